#include "ruelle/suspension.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <unsupported/Eigen/FFT>

#include "ruelle/wavepackets.hpp"

namespace ruelle {

namespace {

constexpr long long kNuLimit = 1LL << 52;  // keeps 2 pi nu exact enough and far from overflow

long long norm2(const Nu& v) { return v[0] * v[0] + v[1] * v[1]; }

double g_norm_of(const Nu& nu, const MetricParams& p) {
  const double a = 2.0 * kPi * static_cast<double>(nu[0]);
  const double b = 2.0 * kPi * static_cast<double>(nu[1]);
  const double r = std::hypot(a, b);
  return delta_perp(r, p) * r;
}

PhasePoint nu_point(const Nu& nu) {
  PhasePoint rho = PhasePoint::origin(2);
  rho.xi(0) = 2.0 * kPi * static_cast<double>(nu[0]);
  rho.xi(1) = 2.0 * kPi * static_cast<double>(nu[1]);
  return rho;
}

std::string nu_string(const Nu& nu) {
  return "(" + std::to_string(nu[0]) + "," + std::to_string(nu[1]) + ")";
}

}  // namespace

MappingTorus MappingTorus::cat() {
  MappingTorus mt;
  mt.f << 2, 1, 1, 1;
  return mt;
}

void MappingTorus::validate() const {
  const long long det = f(0, 0) * f(1, 1) - f(0, 1) * f(1, 0);
  if (det != 1) throw ConfigError("MappingTorus: det f must be 1");
  if (std::llabs(f(0, 0) + f(1, 1)) <= 2) throw ConfigError("MappingTorus: f is not hyperbolic");
  if (roof != 1.0) throw ConfigError("MappingTorus: only the constant roof 1 is supported");
  if (potential != cplx(0.0, 0.0)) throw ConfigError("MappingTorus: only the zero potential is supported");
}

double MappingTorus::lambda() const { return dual_split().lambda; }

DualSplitting MappingTorus::dual_split() const { return DualSplitting::from_matrix(f.cast<double>()); }

Nu MappingTorus::forward(const Nu& nu) const {
  return {f(0, 0) * nu[0] + f(1, 0) * nu[1], f(0, 1) * nu[0] + f(1, 1) * nu[1]};
}

Nu MappingTorus::backward(const Nu& nu) const {
  // (f^T)^{-1} = adj(f^T) since det f = 1.
  return {f(1, 1) * nu[0] - f(1, 0) * nu[1], -f(0, 1) * nu[0] + f(0, 0) * nu[1]};
}

Eigen::Vector3d MappingTorus::flow(const Eigen::Vector3d& mz, double t) const {
  const Eigen::Matrix2d fd = f.cast<double>();
  const Eigen::Matrix2d finv = fd.inverse();
  Eigen::Vector2d m = mz.head<2>();
  double z = mz(2) + t;
  auto wrap = [](Eigen::Vector2d v) {
    for (int i = 0; i < 2; ++i) v(i) -= std::floor(v(i));
    return v;
  };
  while (z >= 1.0) {
    m = wrap(fd * m);
    z -= 1.0;
  }
  while (z < 0.0) {
    m = wrap(finv * m);
    z += 1.0;
  }
  return Eigen::Vector3d(m(0), m(1), z);
}

bool SpectrumResult::all_pass() const {
  return std::all_of(certificates.begin(), certificates.end(), [](const OrbitCertificate& c) { return c.pass; });
}

SpectrumResult zero_sector_spectrum(int K) {
  if (K < 0) throw ConfigError("zero_sector_spectrum: K must be nonnegative");
  SpectrumResult r;
  for (int k = -K; k <= K; ++k) r.points.push_back({cplx(0.0, 2.0 * kPi * k), "zero"});
  return r;
}

double zero_sector_eigen_residual(const MappingTorus& mt, int k, double t, int samples, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const Eigen::Vector3d mz(rng.uniform(), rng.uniform(), rng.uniform());
    const Eigen::Vector3d moved = mt.flow(mz, t);
    const cplx lhs = std::polar(1.0, 2.0 * kPi * k * moved(2));
    const cplx rhs = std::polar(1.0, 2.0 * kPi * k * t) * std::polar(1.0, 2.0 * kPi * k * mz(2));
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

double zero_sector_generator_residual(int k) {
  constexpr int n = 64;
  if (2 * std::abs(k) >= n) throw ResolutionError("zero_sector_generator_residual: |k| too large for 64 points");
  std::vector<cplx> u(n), uh, du(n);
  for (int j = 0; j < n; ++j) u[j] = std::polar(1.0, 2.0 * kPi * k * j / n);
  Eigen::FFT<double> fft;
  fft.fwd(uh, u);
  for (int m = 0; m < n; ++m) {
    const int freq = m < n / 2 ? m : m - n;
    uh[m] *= cplx(0.0, 2.0 * kPi * freq);
  }
  fft.inv(du, uh);
  double worst = 0.0;
  for (int j = 0; j < n; ++j) worst = std::max(worst, std::abs(du[j] - cplx(0.0, 2.0 * kPi * k) * u[j]));
  return worst / std::max(1.0, 2.0 * kPi * std::abs(k));
}

Nu orbit_representative(const MappingTorus& mt, const Nu& nu) {
  if (nu[0] == 0 && nu[1] == 0) throw ConfigError("orbit_representative: nu must be nonzero");
  // |nu_j|^2 is convex in j, so a descent finds the minimum.
  Nu cur = nu;
  for (;;) {
    const Nu a = mt.forward(cur), b = mt.backward(cur);
    if (norm2(a) < norm2(cur)) cur = a;
    else if (norm2(b) < norm2(cur)) cur = b;
    else break;
  }
  Nu best = cur;
  for (const Nu& c : {mt.forward(cur), mt.backward(cur)})
    if (norm2(c) == norm2(cur) && c < best) best = c;
  return best;
}

FourierOrbit build_orbit(const MappingTorus& mt, const Nu& nu, const MetricParams& p, double min_gnorm) {
  FourierOrbit o;
  o.representative = orbit_representative(mt, nu);
  o.dual_split = mt.dual_split();
  std::vector<Nu> back, fwd;
  auto guard = [](const Nu& v) {
    if (std::llabs(v[0]) > kNuLimit || std::llabs(v[1]) > kNuLimit)
      throw ResolutionError("build_orbit: orbit left the representable range before the decay regime");
  };
  Nu cur = o.representative;
  do {
    cur = mt.backward(cur);
    guard(cur);
    back.push_back(cur);
  } while (g_norm_of(cur, p) <= min_gnorm);
  cur = o.representative;
  do {
    cur = mt.forward(cur);
    guard(cur);
    fwd.push_back(cur);
  } while (g_norm_of(cur, p) <= min_gnorm);
  o.points.assign(back.rbegin(), back.rend());
  o.j_back = static_cast<int>(o.points.size());
  o.points.push_back(o.representative);
  o.points.insert(o.points.end(), fwd.begin(), fwd.end());
  return o;
}

std::vector<Nu> orbit_representatives(const MappingTorus& mt, double nu_max) {
  std::set<Nu> reps;
  const long long b = static_cast<long long>(std::floor(nu_max));
  for (long long i = -b; i <= b; ++i) {
    for (long long j = -b; j <= b; ++j) {
      if ((i == 0 && j == 0) || static_cast<double>(i * i + j * j) > nu_max * nu_max) continue;
      reps.insert(orbit_representative(mt, {i, j}));
    }
  }
  return {reps.begin(), reps.end()};
}

Eigen::MatrixXd SectorOperator::matrix() const {
  const long n = static_cast<long>(entries.size()) + 1;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (long j = 0; j + 1 < n; ++j) m(j + 1, j) = entries[j];
  return m;
}

double SectorOperator::norm_bound() const {
  return entries.empty() ? 0.0 : *std::max_element(entries.begin(), entries.end());
}

SectorOperator orbit_sector_operator(const FourierOrbit& orbit, const EscapeConfig& cfg, const MetricParams& p,
                                     double min_gnorm) {
  if (orbit.points.size() < 2) throw ResolutionError("orbit_sector_operator: window has fewer than two points");
  if (g_norm_of(orbit.points.front(), p) <= min_gnorm || g_norm_of(orbit.points.back(), p) <= min_gnorm)
    throw ResolutionError("orbit_sector_operator: window too small to reach the decay regime for orbit " +
                          nu_string(orbit.representative));
  SectorOperator op;
  std::vector<double> w(orbit.points.size());
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = weight(nu_point(orbit.points[j]), orbit.dual_split, cfg, p);
  for (std::size_t j = 0; j + 1 < w.size(); ++j) op.entries.push_back(w[j + 1] / w[j]);
  return op;
}

SpectrumResult full_spectrum(const MappingTorus& mt, int K, double nu_max, const EscapeConfig& cfg,
                             const MetricParams& p, double threshold) {
  mt.validate();
  cfg.validate();
  if (!(threshold > 0.0)) throw ConfigError("full_spectrum: threshold must be positive");
  SpectrumResult r = zero_sector_spectrum(K);
  r.threshold = threshold;
  const auto reps = orbit_representatives(mt, nu_max);
  r.certificates.resize(reps.size());
  parallel_for(reps.size(), [&](std::size_t i) {
    const FourierOrbit o = build_orbit(mt, reps[i], p);
    const double nb = orbit_sector_operator(o, cfg, p).norm_bound();
    r.certificates[i] = {reps[i], nb, nb < threshold};
  });
  return r;
}

void require_certified(const SpectrumResult& r) {
  std::ostringstream os;
  std::size_t bad = 0;
  for (const auto& c : r.certificates) {
    if (c.pass) continue;
    os << (bad++ ? ", " : "") << nu_string(c.nu) << " norm " << c.norm_bound;
  }
  if (bad) throw CertificateError(std::to_string(bad) + " orbit(s) above threshold: " + os.str());
}

int weyl_count(const SpectrumResult& spec, double gamma_re, double omega) {
  int n = 0;
  for (const auto& pt : spec.points)
    if (pt.z.real() > gamma_re && pt.z.imag() >= omega && pt.z.imag() < omega + 1.0) ++n;
  return n;
}

double weyl_density_exponent(const SpectrumResult& spec, double gamma_re, const std::vector<double>& omegas,
                             double window_step) {
  std::vector<double> lx, ly;
  int best = 0;
  double w = 0.0;
  for (double om : omegas) {
    for (; w <= om; w += window_step) best = std::max(best, weyl_count(spec, gamma_re, w));
    if (best == 0 || om <= 0.0) continue;
    lx.push_back(std::log(om));
    ly.push_back(std::log(static_cast<double>(best)));
  }
  if (lx.size() < 3) throw ConfigError("weyl_density_exponent: fewer than three nonempty windows");
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

FourierSeries transfer_time_one(const MappingTorus& mt, const FourierSeries& u) {
  FourierSeries out;
  for (const auto& [nu, c] : u) out[mt.forward(nu)] += c;
  return out;
}

FourierSeries project_orbit(const MappingTorus& mt, const FourierSeries& u, const Nu& nu) {
  const Nu rep = orbit_representative(mt, nu);
  FourierSeries out;
  for (const auto& [k, c] : u)
    if (!(k[0] == 0 && k[1] == 0) && orbit_representative(mt, k) == rep) out[k] = c;
  return out;
}

bool in_parabolic_vicinity(const PhasePoint& rho, double omega0, double eps, const DualSplitting& split,
                           const MetricParams& p) {
  const double xn = rho.eta_norm();
  if (xn <= 1.0) return true;
  const Eigen::Vector2d c = split.decompose(Eigen::Vector2d(rho.xi(0), rho.xi(1)));
  const double lim = std::pow(xn, eps);
  return jbracket(rho.omega - omega0) <= lim && jbracket(std::pow(xn, -p.alpha_perp) * std::abs(c(1))) <= lim;
}

std::vector<WavefrontRecord> wavefront_profile(int k, const std::vector<PhasePoint>& probe, const MetricParams& p,
                                               const EscapeConfig& cfg, const DualSplitting& split, double eps,
                                               double chart_half_width) {
  const double omega0 = 2.0 * kPi * k;
  std::vector<WavefrontRecord> out(probe.size());
  for (const auto& rho : probe) {
    const double en = rho.eta_norm();
    if (std::max(delta_perp(en, p), delta_par(en, p)) > 0.2 * chart_half_width)
      throw ResolutionError("wavefront_profile: packet wider than a fifth of the chart");
  }
  parallel_for(probe.size(), [&](std::size_t i) {
    const PhasePoint& rho = probe[i];
    out[i] = {rho, gaussian_plane_wave_overlap(rho, omega0, p, chart_half_width), weight(rho, split, cfg, p),
              in_parabolic_vicinity(rho, omega0, eps, split, p)};
  });
  return out;
}

double wavefront_constant(const std::vector<WavefrontRecord>& rec, double omega0, double N) {
  double c = 0.0;
  for (const auto& r : rec) c = std::max(c, r.value * std::pow(jbracket(r.rho.omega - omega0), N) * r.weight);
  return c;
}

double vicinity_constant(const std::vector<WavefrontRecord>& rec, double N) {
  double c = 0.0;
  for (const auto& r : rec)
    if (!r.in_vicinity) c = std::max(c, r.value * std::pow(jbracket(r.rho.eta_norm()), N));
  return c;
}

}  // namespace ruelle
