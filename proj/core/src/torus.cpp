#include "ruelle/torus.hpp"

#include <unsupported/Eigen/FFT>
#include <cmath>

namespace ruelle {

TorusGrid::TorusGrid(int d_, int N_) : d(d_), N(N_) {
  if (d < 1 || d > 4) throw ConfigError("torus dimension must be in [1, 4]");
  if (N < 4 || N % 2 != 0) throw ConfigError("grid size must be even and at least 4");
}

long TorusGrid::size() const {
  long s = 1;
  for (int i = 0; i < d; ++i) s *= N;
  return s;
}

Eigen::VectorXd TorusGrid::point(long idx) const {
  Eigen::VectorXd y(d);
  for (int i = d - 1; i >= 0; --i) {
    y(i) = spacing() * static_cast<double>(idx % N);
    idx /= N;
  }
  return y;
}

Eigen::VectorXi TorusGrid::mode(long idx) const {
  Eigen::VectorXi k(d);
  for (int i = d - 1; i >= 0; --i) {
    int b = static_cast<int>(idx % N);
    k(i) = b < N / 2 ? b : b - N;
    idx /= N;
  }
  return k;
}

long TorusGrid::mode_index(const Eigen::VectorXi& k) const {
  long idx = 0;
  for (int i = 0; i < d; ++i) {
    if (k(i) < -N / 2 || k(i) >= N / 2) return -1;
    idx = idx * N + (k(i) < 0 ? k(i) + N : k(i));
  }
  return idx;
}

namespace {
// In-place transform along every axis; sign -1 forward, +1 inverse, unscaled.
void transform(const TorusGrid& g, Eigen::VectorXcd& a, bool inverse) {
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  const long total = g.size();
  std::vector<cplx> in(g.N), out(g.N);
  long stride = total;
  for (int ax = 0; ax < g.d; ++ax) {
    stride /= g.N;
    const long block = stride * g.N;
    for (long base = 0; base < total; base += block) {
      for (long off = 0; off < stride; ++off) {
        for (int i = 0; i < g.N; ++i) in[i] = a(base + off + i * stride);
        if (inverse) fft.inv(out, in);
        else fft.fwd(out, in);
        for (int i = 0; i < g.N; ++i) a(base + off + i * stride) = out[i];
      }
    }
  }
}
}  // namespace

Eigen::VectorXcd to_modes(const TorusGrid& g, const Eigen::VectorXcd& samples) {
  if (samples.size() != g.size()) throw ConfigError("to_modes: sample count does not match grid");
  Eigen::VectorXcd a = samples;
  transform(g, a, false);
  return a * (std::pow(2.0 * kPi, 0.5 * g.d) / static_cast<double>(g.size()));
}

Eigen::VectorXcd from_modes(const TorusGrid& g, const Eigen::VectorXcd& modes) {
  if (modes.size() != g.size()) throw ConfigError("from_modes: mode count does not match grid");
  Eigen::VectorXcd a = modes;
  transform(g, a, true);
  return a * std::pow(2.0 * kPi, -0.5 * g.d);
}

cplx grid_inner(const TorusGrid& g, const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  return a.dot(b) * std::pow(g.spacing(), g.d);
}

double grid_norm(const TorusGrid& g, const Eigen::VectorXcd& a) {
  return std::sqrt(a.squaredNorm() * std::pow(g.spacing(), g.d));
}

double wrap_centered(double s) {
  double t = std::fmod(s + kPi, 2.0 * kPi);
  if (t < 0) t += 2.0 * kPi;
  return t - kPi;
}

}  // namespace ruelle
