#include "ruelle/wavepackets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <ostream>

#include "ruelle/quadrature.hpp"

namespace ruelle {

namespace {

// Integrand cut: exp(-kReach^2) is below double round-off relative to 1.
constexpr double kReach = 6.0;
constexpr int kHermiteNodes = 32;
constexpr int kPanelNodes = 10;

double axis_delta(int axis, int d, double eta_norm, const MetricParams& p) {
  return axis == d - 1 ? delta_par(eta_norm, p) : delta_perp(eta_norm, p);
}

double min_delta(double eta_norm, const MetricParams& p) {
  return std::min(delta_perp(eta_norm, p), delta_par(eta_norm, p));
}

// Smallest R (up to a factor 1.25) with delta(|eta| + R) R >= c, so that a
// Gaussian of width 1/delta centred within R of eta is negligible beyond R.
double reach(double eta_norm, const MetricParams& p, double c = kReach) {
  double R = c / min_delta(eta_norm, p);
  while (min_delta(eta_norm + R, p) * R < c) R *= 1.25;
  return R;
}

// Composite Gauss-Legendre on [a, b] with panels no wider than `width`.
template <class F>
double composite_gl(double a, double b, double width, const QuadratureRule& gl, F&& f) {
  if (b <= a) return 0.0;
  const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / width)));
  const double w = (b - a) / panels;
  double s = 0.0;
  for (int q = 0; q < panels; ++q) {
    const double mid = a + (q + 0.5) * w;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) s += gl.weights[i] * f(mid + 0.5 * w * gl.nodes[i]);
  }
  return 0.5 * w * s;
}

// Integrates over [a, b] with extra breakpoints; the panel width may vary
// between breaks through width_at(left end of the piece).
template <class W, class F>
double split_gl(double a, double b, std::vector<double> breaks, const QuadratureRule& gl, W&& width_at, F&& f) {
  breaks.push_back(a);
  breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double lo = std::max(a, breaks[i]);
    const double hi = std::min(b, breaks[i + 1]);
    if (hi > lo) s += composite_gl(lo, hi, width_at(lo, hi), gl, f);
  }
  return s;
}

long long lattice_key(const Eigen::VectorXi& k) {
  long long key = 0;
  for (int i = 0; i < k.size(); ++i) key = (key << 16) | static_cast<long long>((k(i) + 32768) & 0xffff);
  return key;
}

const QuadratureRule& panel_rule() {
  static const QuadratureRule r = gauss_legendre(kPanelNodes);
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------

ChartAtlas ChartAtlas::single(const TorusGrid& g) {
  ChartAtlas a{g, {}};
  a.charts.push_back({Eigen::VectorXi::Zero(g.d), Eigen::VectorXd::Ones(g.size())});
  return a;
}

ChartAtlas ChartAtlas::circle_pair(const TorusGrid& g) {
  if (g.d != 1) throw ConfigError("circle_pair: atlas needs a one-dimensional grid");
  // psi = 0 near theta = 0 and pi/2 near theta = pi; chi_1 = cos psi and
  // chi_2 = sin psi, each read in its own chart coordinates.
  auto psi = [](double theta) {
    const double s = std::abs(wrap_centered(theta));
    return 0.5 * kPi * smooth_step((s - 0.25 * kPi) / (0.5 * kPi));
  };
  ChartAtlas a{g, {}};
  for (int j = 0; j < 2; ++j) {
    Chart c{Eigen::VectorXi::Constant(1, j * g.N / 2), Eigen::VectorXd(g.size())};
    for (long i = 0; i < g.size(); ++i) {
      const double theta = g.spacing() * static_cast<double>(i + c.shift(0));
      c.chi(i) = j == 0 ? std::cos(psi(theta)) : std::sin(psi(theta));
    }
    a.charts.push_back(std::move(c));
  }
  return a;
}

namespace {
// Flattened index of grid point idx moved by `shift` cells on every axis.
long shifted(const TorusGrid& g, long idx, const Eigen::VectorXi& shift) {
  long out = 0;
  long stride = g.size();
  for (int ax = 0; ax < g.d; ++ax) {
    stride /= g.N;
    const long c = (idx / stride) % g.N;
    out = out * g.N + ((c + shift(ax)) % g.N + g.N) % g.N;
  }
  return out;
}
}  // namespace

double ChartAtlas::partition_defect() const {
  double worst = 0.0;
  for (long m = 0; m < grid.size(); ++m) {
    double s = 0.0;
    for (const auto& c : charts) {
      const double v = c.chi(shifted(grid, m, -c.shift));
      s += v * v;
    }
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

std::vector<Eigen::VectorXcd> chart_decompose(const ChartAtlas& atlas, const Eigen::VectorXcd& u) {
  if (u.size() != atlas.grid.size()) throw ConfigError("chart_decompose: function does not match atlas grid");
  std::vector<Eigen::VectorXcd> v;
  for (const auto& c : atlas.charts) {
    Eigen::VectorXcd w(u.size());
    for (long i = 0; i < u.size(); ++i) w(i) = c.chi(i) * u(shifted(atlas.grid, i, c.shift));
    v.push_back(std::move(w));
  }
  return v;
}

Eigen::VectorXcd chart_recompose(const ChartAtlas& atlas, const std::vector<Eigen::VectorXcd>& v) {
  if (v.size() != atlas.charts.size()) throw ConfigError("chart_recompose: wrong number of chart functions");
  Eigen::VectorXcd u = Eigen::VectorXcd::Zero(atlas.grid.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    const auto& c = atlas.charts[j];
    if (v[j].size() != u.size()) throw ConfigError("chart_recompose: function does not match atlas grid");
    for (long m = 0; m < u.size(); ++m) {
      const long i = shifted(atlas.grid, m, -c.shift);
      u(m) += c.chi(i) * v[j](i);
    }
  }
  return u;
}

// ---------------------------------------------------------------------------

double packet_hat0(const Eigen::VectorXd& eta, const Eigen::VectorXd& eta_prime, const MetricParams& p) {
  const int d = static_cast<int>(eta.size());
  const double en = eta.norm();
  double e = 0.0;
  for (int a = 0; a < d; ++a) {
    const double t = axis_delta(a, d, en, p) * (eta_prime(a) - eta(a));
    e += t * t;
  }
  return std::exp(-0.5 * e);
}

PacketNormalizer::PacketNormalizer(const MetricParams& p, int d) : p_(p), d_(d) {
  if (d < 1 || d > 4) throw ConfigError("PacketNormalizer: dimension must be in [1, 4]");
  for (double a : {p.alpha_perp, p.alpha_par}) {
    if (a > 0.0) caps_.push_back(std::pow(p.delta0, -1.0 / a));
  }
  const auto gh = gauss_hermite(kHermiteNodes);
  gh_nodes_ = gh.nodes;
  for (std::size_t i = 0; i < gh.nodes.size(); ++i)
    gh_scaled_weights_.push_back(gh.weights[i] * std::exp(gh.nodes[i] * gh.nodes[i]));
}

double PacketNormalizer::m_constant_metric(const Eigen::VectorXd& eta_prime) const {
  const double en = eta_prime.norm();
  double s = std::pow(kPi, 0.5 * d_);
  for (int a = 0; a < d_; ++a) s /= axis_delta(a, d_, en, p_);
  return s;
}

bool PacketNormalizer::near_cap(const Eigen::VectorXd& eta_prime) const {
  // The integrand on a cap circle is at most exp(-delta(cap)^2 D^2) with D
  // the distance from eta' to that circle.
  const double en = eta_prime.norm();
  for (double c : caps_)
    if (min_delta(c, p_) * std::abs(en - c) < kReach) return true;
  return false;
}

double PacketNormalizer::m_gauss_hermite(const Eigen::VectorXd& eta_prime) const {
  const double en = eta_prime.norm();
  std::vector<double> scale(d_);
  for (int a = 0; a < d_; ++a) scale[a] = axis_delta(a, d_, en, p_);
  const int q = static_cast<int>(gh_nodes_.size());
  long total = 1;
  for (int a = 0; a < d_; ++a) total *= q;
  Eigen::VectorXd eta(d_);
  double s = 0.0;
  for (long idx = 0; idx < total; ++idx) {
    long r = idx;
    double w = 1.0;
    for (int a = 0; a < d_; ++a) {
      const int i = static_cast<int>(r % q);
      r /= q;
      eta(a) = eta_prime(a) + gh_nodes_[i] / scale[a];
      w *= gh_scaled_weights_[i] / scale[a];
    }
    const double h = packet_hat0(eta, eta_prime, p_);
    s += w * h * h;
  }
  return s;
}

double PacketNormalizer::m_split(const Eigen::VectorXd& eta_prime) const {
  const auto& gl = panel_rule();
  const double en = eta_prime.norm();
  const double R = reach(en, p_);
  auto f = [&](const Eigen::VectorXd& eta) {
    const double h = packet_hat0(eta, eta_prime, p_);
    return h * h;
  };
  auto width = [&](double lo, double) {
    return 2.5 / std::max(delta_perp(std::abs(lo), p_), delta_par(std::abs(lo), p_));
  };
  if (d_ == 1) {
    std::vector<double> breaks{eta_prime(0)};
    for (double c : caps_) {
      breaks.push_back(c);
      breaks.push_back(-c);
    }
    // width_at receives signed ends; the larger delta sits at the end nearer 0.
    auto w1 = [&](double lo, double hi) {
      const double r = (lo <= 0.0 && hi >= 0.0) ? 0.0 : std::min(std::abs(lo), std::abs(hi));
      return width(r, r);
    };
    Eigen::VectorXd eta(1);
    return split_gl(eta_prime(0) - R, eta_prime(0) + R, breaks, gl, w1, [&](double t) {
      eta(0) = t;
      return f(eta);
    });
  }
  if (d_ != 2) throw ResolutionError("m_split: only one- and two-dimensional frequency spaces");
  // Polar coordinates about the origin: the caps are circles.
  const double r0 = std::max(0.0, en - R);
  const double r1 = en + R;
  const double theta0 = std::atan2(eta_prime(1), eta_prime(0));
  std::vector<double> breaks{en};
  for (double c : caps_) breaks.push_back(c);
  Eigen::VectorXd eta(2);
  auto radial = [&](double r) {
    if (r <= 0.0) return 0.0;
    // Angular half-range within distance R of eta'.
    double half = kPi;
    if (en > 0.0) {
      const double c = (r * r + en * en - R * R) / (2.0 * r * en);
      if (c >= 1.0) return 0.0;
      if (c > -1.0) half = std::acos(c);
    }
    const double dmax = std::max(delta_perp(r, p_), delta_par(r, p_));
    const double arc_width = 2.5 / (dmax * r);
    return r * composite_gl(theta0 - half, theta0 + half, arc_width, gl, [&](double th) {
             eta(0) = r * std::cos(th);
             eta(1) = r * std::sin(th);
             return f(eta);
           });
  };
  return split_gl(r0, r1, breaks, gl, width, radial);
}

double PacketNormalizer::m(const Eigen::VectorXd& eta_prime) const {
  if (eta_prime.size() != d_) throw ConfigError("PacketNormalizer: frequency has wrong dimension");
  if (d_ <= 2 && near_cap(eta_prime)) return m_split(eta_prime);
  return m_gauss_hermite(eta_prime);
}

double PacketNormalizer::m_lattice(const Eigen::VectorXi& k) const {
  const long long key = lattice_key(k);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  const double v = m(k.cast<double>());
  std::lock_guard<std::mutex> lock(mu_);
  cache_.emplace(key, v);
  return v;
}

double packet_hat(const PacketNormalizer& norm, const Eigen::VectorXd& eta, const Eigen::VectorXi& k) {
  return packet_hat0(eta, k.cast<double>(), norm.params()) / std::sqrt(norm.m_lattice(k));
}

namespace {
// Integer box of lattice points carrying phi0_eta above round-off, per axis.
std::vector<int> lattice_reach(const Eigen::VectorXd& eta, const MetricParams& p) {
  const int d = static_cast<int>(eta.size());
  const double en = eta.norm();
  const double R = reach(en, p);
  std::vector<int> r(d);
  for (int a = 0; a < d; ++a) {
    double ra = kReach / axis_delta(a, d, en, p);
    while (axis_delta(a, d, en + std::min(ra, R), p) * ra < kReach) ra *= 1.25;
    r[a] = static_cast<int>(std::ceil(std::min(ra, R)));
  }
  return r;
}

template <class F>
void for_each_box_point(const Eigen::VectorXi& lo, const Eigen::VectorXi& hi, F&& f) {
  const int d = static_cast<int>(lo.size());
  Eigen::VectorXi k = lo;
  for (int a = 0; a < d; ++a)
    if (hi(a) < lo(a)) return;
  while (true) {
    f(k);
    int a = d - 1;
    while (a >= 0 && k(a) == hi(a)) {
      k(a) = lo(a);
      --a;
    }
    if (a < 0) return;
    ++k(a);
  }
}
}  // namespace

double exact_packet_norm_sq(const PacketNormalizer& norm, const Eigen::VectorXd& eta) {
  const int d = norm.dim();
  if (eta.size() != d) throw ConfigError("exact_packet_norm_sq: frequency has wrong dimension");
  const auto r = lattice_reach(eta, norm.params());
  Eigen::VectorXi lo(d), hi(d);
  for (int a = 0; a < d; ++a) {
    lo(a) = static_cast<int>(std::floor(eta(a))) - r[a];
    hi(a) = static_cast<int>(std::ceil(eta(a))) + r[a];
  }
  // Rows along axis 0 are independent; sum them in parallel.
  const int rows = hi(0) - lo(0) + 1;
  std::vector<double> partial(rows, 0.0);
  parallel_for(rows, [&](std::size_t i) {
    Eigen::VectorXi l = lo, h = hi;
    l(0) = h(0) = lo(0) + static_cast<int>(i);
    double s = 0.0;
    for_each_box_point(l, h, [&](const Eigen::VectorXi& k) {
      const double v = packet_hat0(eta, k.cast<double>(), norm.params());
      if (v < 1e-18) return;
      s += v * v / norm.m_lattice(k);
    });
    partial[i] = s;
  });
  double s = 0.0;
  for (double v : partial) s += v;
  return s;
}

// ---------------------------------------------------------------------------

double chart_cutoff(double s, double half_width) {
  const double t = (std::abs(s) - 0.5 * half_width) / (0.5 * half_width);
  return 1.0 - smooth_step(t);
}

WavePacket make_packet(const PhasePoint& rho, PacketKind kind, const PacketNormalizer& norm,
                       const TorusGrid& grid, double chart_half_width) {
  const int d = grid.d;
  if (rho.n() + 1 != d || norm.dim() != d) throw ConfigError("make_packet: phase point does not match grid");
  const MetricParams& p = norm.params();
  const double en = rho.eta_norm();
  if (2.0 * min_delta(en, p) < 4.0 * grid.spacing())
    throw ResolutionError("make_packet: packet width is under four grid cells");
  Eigen::VectorXd y(d), eta(d);
  y << rho.x, rho.z;
  eta << rho.xi, rho.omega;

  WavePacket w{rho, kind, Eigen::VectorXcd(grid.size()), 1.0};
  if (kind == PacketKind::gaussian) {
    std::vector<double> dl(d);
    for (int a = 0; a < d; ++a) dl[a] = axis_delta(a, d, en, p);
    for (long i = 0; i < grid.size(); ++i) {
      const Eigen::VectorXd yp = grid.point(i);
      double chi = 1.0, e = 0.0, ph = 0.0;
      for (int a = 0; a < d; ++a) {
        const double s = wrap_centered(yp(a) - y(a));
        chi *= chart_cutoff(s, chart_half_width);
        e += 0.5 * (s / dl[a]) * (s / dl[a]);
        ph += eta(a) * s;
      }
      w.samples(i) = chi * std::exp(-e) * std::polar(1.0, ph);
    }
    const double nrm = grid_norm(grid, w.samples);
    if (!(nrm > 0.0)) throw ResolutionError("make_packet: gaussian packet vanishes on the grid");
    w.normalization = 1.0 / nrm;
    w.samples *= w.normalization;
    return w;
  }

  const auto r = lattice_reach(eta, p);
  for (int a = 0; a < d; ++a) {
    if (eta(a) - r[a] < -grid.N / 2 || eta(a) + r[a] > grid.N / 2 - 1)
      throw ResolutionError("make_packet: packet spectrum leaves the grid's mode box");
  }
  Eigen::VectorXcd modes = Eigen::VectorXcd::Zero(grid.size());
  for (long idx = 0; idx < grid.size(); ++idx) {
    const Eigen::VectorXi k = grid.mode(idx);
    const double v = packet_hat0(eta, k.cast<double>(), p);
    if (v < 1e-18) continue;
    modes(idx) = v / std::sqrt(norm.m_lattice(k)) * std::polar(1.0, -k.cast<double>().dot(y));
  }
  w.samples = from_modes(grid, modes);
  return w;
}

// ---------------------------------------------------------------------------

TorusBargmann::TorusBargmann(std::shared_ptr<const PacketNormalizer> norm, PhaseGridSpec spec)
    : norm_(std::move(norm)), spec_(spec) {
  if (!norm_ || norm_->dim() != spec_.grid.d) throw ConfigError("TorusBargmann: normalizer does not match grid");
  if (spec_.L <= 0.0) spec_.L = spec_.grid.N / 2;
  if (!(spec_.h > 0.0) || spec_.L > spec_.grid.N / 2)
    throw ConfigError("TorusBargmann: need h > 0 and frequency half width at most N/2");
  per_axis_ = 2 * static_cast<int>(std::floor(spec_.L / spec_.h + 1e-9)) + 1;
}

void TorusBargmann::check_band(const Eigen::VectorXcd& uh) const {
  // The transform is evaluated mode by mode, which is exact for grid
  // functions whose spectrum stays off the edge of the mode box.
  const auto& g = spec_.grid;
  const double cut = 1e-10 * uh.cwiseAbs().maxCoeff();
  for (long i = 0; i < g.size(); ++i) {
    if (std::abs(uh(i)) > cut && g.mode(i).cwiseAbs().maxCoeff() >= g.N / 2 - 1)
      throw ResolutionError("TorusBargmann: function is not band limited inside the grid's mode box");
  }
}

double TorusBargmann::cell_weight() const {
  const int d = spec_.grid.d;
  return std::pow(spec_.grid.spacing() * spec_.h / (2.0 * kPi), d);
}

long TorusBargmann::eta_count() const {
  long c = 1;
  for (int a = 0; a < spec_.grid.d; ++a) c *= per_axis_;
  return c;
}

Eigen::VectorXd TorusBargmann::eta(long e) const {
  const int d = spec_.grid.d;
  const int half = per_axis_ / 2;
  Eigen::VectorXd v(d);
  for (int a = d - 1; a >= 0; --a) {
    v(a) = spec_.h * static_cast<double>(e % per_axis_ - half);
    e /= per_axis_;
  }
  return v;
}

const std::vector<double>& TorusBargmann::mode_norms() const {
  std::call_once(m_once_, [&] {
    const auto& g = spec_.grid;
    m_modes_.assign(g.size(), 0.0);
    parallel_for(g.size(), [&](std::size_t i) { m_modes_[i] = norm_->m_lattice(g.mode(static_cast<long>(i))); });
  });
  return m_modes_;
}

std::vector<cplx> TorusBargmann::forward_points(const Eigen::VectorXcd& u, const std::vector<PhasePoint>& rhos) const {
  const auto& g = spec_.grid;
  const Eigen::VectorXcd uh = checked_modes(u);
  std::vector<cplx> out(rhos.size());
  parallel_for(rhos.size(), [&](std::size_t r) {
    const PhasePoint& rho = rhos[r];
    if (rho.n() + 1 != g.d) throw ConfigError("forward_points: phase point does not match grid");
    Eigen::VectorXd y(g.d), eta(g.d);
    y << rho.x, rho.z;
    eta << rho.xi, rho.omega;
    cplx s = 0.0;
    for (long idx = 0; idx < g.size(); ++idx) {
      if (uh(idx) == cplx(0.0)) continue;
      const Eigen::VectorXd k = g.mode(idx).cast<double>();
      const double v = packet_hat0(eta, k, norm_->params());
      if (v < 1e-18) continue;
      s += v / std::sqrt(norm_->m_lattice(g.mode(idx))) * std::polar(1.0, k.dot(y)) * uh(idx);
    }
    out[r] = s;
  });
  return out;
}

bool TorusBargmann::forward_column(const Eigen::VectorXcd& uh, long e, Eigen::VectorXcd& out) const {
  const auto& g = spec_.grid;
  const double c = std::pow(2.0 * kPi, 0.5 * g.d);
  const Eigen::VectorXd et = eta(e);
  Eigen::VectorXcd coef = Eigen::VectorXcd::Zero(g.size());
  bool any = false;
  for (long idx = 0; idx < g.size(); ++idx) {
    if (uh(idx) == cplx(0.0)) continue;
    const double v = packet_hat0(et, g.mode(idx).cast<double>(), norm_->params());
    if (v < 1e-18) continue;
    coef(idx) = c * v / std::sqrt(norm_->m_lattice(g.mode(idx))) * uh(idx);
    any = true;
  }
  if (!any) {
    out.setZero(g.size());
    return false;
  }
  out = from_modes(g, coef);
  return true;
}

double TorusBargmann::column_energy(const Eigen::VectorXcd& uh, long e) const {
  // sum_j |(Bu)(y_j, eta_e)|^2 by the discrete Parseval identity.
  const auto& g = spec_.grid;
  const Eigen::VectorXd et = eta(e);
  double s = 0.0;
  for (long idx = 0; idx < g.size(); ++idx) {
    if (uh(idx) == cplx(0.0)) continue;
    const double v = packet_hat0(et, g.mode(idx).cast<double>(), norm_->params());
    if (v < 1e-18) continue;
    s += v * v / norm_->m_lattice(g.mode(idx)) * std::norm(uh(idx));
  }
  return s * static_cast<double>(g.size());
}

Eigen::VectorXcd TorusBargmann::checked_modes(const Eigen::VectorXcd& u) const {
  Eigen::VectorXcd uh = to_modes(spec_.grid, u);
  check_band(uh);
  // Transform round-off is dropped so sparse spectra stay sparse.
  const double cut = 1e-15 * uh.cwiseAbs().maxCoeff();
  for (auto& v : uh)
    if (std::abs(v) <= cut) v = 0.0;
  return uh;
}

Eigen::MatrixXcd TorusBargmann::forward(const Eigen::VectorXcd& u) const {
  const Eigen::VectorXcd uh = checked_modes(u);
  Eigen::MatrixXcd field(spec_.grid.size(), eta_count());
  parallel_for(eta_count(), [&](std::size_t e) {
    Eigen::VectorXcd col;
    forward_column(uh, static_cast<long>(e), col);
    field.col(static_cast<long>(e)) = col;
  });
  return field;
}

Eigen::VectorXcd TorusBargmann::adjoint(const Eigen::MatrixXcd& v) const {
  const auto& g = spec_.grid;
  if (v.rows() != g.size() || v.cols() != eta_count()) throw ConfigError("adjoint: field does not match phase grid");
  const auto& mn = mode_norms();
  Eigen::MatrixXcd vh(g.size(), eta_count());
  parallel_for(eta_count(), [&](std::size_t e) { vh.col(static_cast<long>(e)) = to_modes(g, v.col(static_cast<long>(e))); });
  const double c = cell_weight() * static_cast<double>(g.size()) * std::pow(2.0 * kPi, -0.5 * g.d);
  Eigen::VectorXcd out(g.size());
  parallel_for(g.size(), [&](std::size_t i) {
    const Eigen::VectorXd k = g.mode(static_cast<long>(i)).cast<double>();
    cplx s = 0.0;
    for (long e = 0; e < eta_count(); ++e) {
      const double w = packet_hat0(eta(e), k, norm_->params());
      if (w >= 1e-18) s += w * vh(static_cast<long>(i), e);
    }
    out(static_cast<long>(i)) = c * s / std::sqrt(mn[i]);
  });
  return from_modes(g, out);
}

double TorusBargmann::mode_multiplier(const Eigen::VectorXi& k,
                                      const std::function<double(const Eigen::VectorXd&)>& a) const {
  const int d = spec_.grid.d;
  const Eigen::VectorXd kd = k.cast<double>();
  // Nodes eta with phi0_eta(k) above round-off lie within the reach of k.
  const auto r = lattice_reach(kd, norm_->params());
  const int half = per_axis_ / 2;
  Eigen::VectorXi lo(d), hi(d);
  for (int ax = 0; ax < d; ++ax) {
    lo(ax) = std::max(-half, static_cast<int>(std::floor((kd(ax) - 2 * r[ax]) / spec_.h)));
    hi(ax) = std::min(half, static_cast<int>(std::ceil((kd(ax) + 2 * r[ax]) / spec_.h)));
  }
  double s = 0.0;
  for_each_box_point(lo, hi, [&](const Eigen::VectorXi& j) {
    const Eigen::VectorXd et = spec_.h * j.cast<double>();
    const double v = packet_hat0(et, kd, norm_->params());
    if (v >= 1e-18) s += a(et) * v * v;
  });
  return s * std::pow(spec_.h, d) / norm_->m_lattice(k);
}

Eigen::VectorXcd TorusBargmann::resolve_identity(const Eigen::VectorXcd& u) const {
  const auto& g = spec_.grid;
  Eigen::VectorXcd uh = to_modes(g, u);
  check_band(uh);
  const double cut = 1e-13 * uh.cwiseAbs().maxCoeff();
  auto one = [](const Eigen::VectorXd&) { return 1.0; };
  parallel_for(g.size(), [&](std::size_t i) {
    const long idx = static_cast<long>(i);
    uh(idx) = std::abs(uh(idx)) <= cut ? cplx(0.0) : uh(idx) * mode_multiplier(g.mode(idx), one);
  });
  return from_modes(g, uh);
}

double gaussian_plane_wave_overlap(const PhasePoint& rho, double omega0, const MetricParams& p,
                                   double chart_half_width) {
  const auto& gl = panel_rule();
  const double en = rho.eta_norm();
  const double b = chart_half_width;
  // One axis: |int chi e^{-s^2/(2 dl^2)} e^{i f s} ds| / (int chi^2 e^{-s^2/dl^2} ds)^{1/2}.
  auto axis = [&](double dl, double f, bool plane) {
    const double w = 0.25 * std::min(dl, 1.0 / std::max(1.0, std::abs(f)));
    const double nsq = composite_gl(-b, b, w, gl, [&](double s) {
      const double c = chart_cutoff(s, b);
      return c * c * std::exp(-(s / dl) * (s / dl));
    });
    if (!plane) return std::sqrt(nsq);
    // Even integrand: the imaginary part cancels.
    const double re = composite_gl(-b, b, w, gl, [&](double s) {
      return chart_cutoff(s, b) * std::exp(-0.5 * (s / dl) * (s / dl)) * std::cos(f * s);
    });
    return std::abs(re) / std::sqrt(nsq);
  };
  double v = axis(delta_par(en, p), omega0 - rho.omega, true);
  const double dp = delta_perp(en, p);
  for (int i = 0; i < rho.n(); ++i) v *= axis(dp, -rho.xi(i), true);
  return v;
}

void write_bargmann_csv(std::ostream& os, const TorusBargmann& b, const Eigen::MatrixXcd& field) {
  const auto& g = b.grid();
  const int n = g.d - 1;
  if (field.rows() != g.size() || field.cols() != b.eta_count())
    throw ConfigError("write_bargmann_csv: field does not match phase grid");
  for (int i = 0; i < n; ++i) os << (n == 1 ? "x," : "x" + std::to_string(i + 1) + ",");
  os << "z,";
  for (int i = 0; i < n; ++i) os << (n == 1 ? "xi," : "xi" + std::to_string(i + 1) + ",");
  os << "omega,re,im,abs\n";
  char buf[64];
  auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof buf, "%.17g%c", v, sep);
    os << buf;
  };
  for (long e = 0; e < field.cols(); ++e) {
    const Eigen::VectorXd et = b.eta(e);
    for (long i = 0; i < field.rows(); ++i) {
      const Eigen::VectorXd y = g.point(i);
      for (int a = 0; a < g.d; ++a) put(y(a), ',');
      for (int a = 0; a < g.d; ++a) put(et(a), ',');
      const cplx v = field(i, e);
      put(v.real(), ',');
      put(v.imag(), ',');
      put(std::abs(v), '\n');
    }
  }
}

}  // namespace ruelle
