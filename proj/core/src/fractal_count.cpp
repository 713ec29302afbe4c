#include "ruelle/fractal_count.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ruelle/common.hpp"

namespace ruelle {

namespace {

constexpr int kSamplesPerCell = 16;
constexpr long long kMaxCells = 1LL << 24;

double wrap01(double x) { return x - std::floor(x); }

// Oscillation of omega varpi_i over the 16 interior samples of cell j.
double cell_range(const HolderForm& f, int axis, long long j, double side) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int s = 0; s < kSamplesPerCell; ++s) {
    const double v = f.component(axis, (static_cast<double>(j) + (s + 0.5) / kSamplesPerCell) * side);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi - lo;
}

double lsq_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

double HolderForm::component(int axis, double x) const {
  const auto& ph = phases[static_cast<std::size_t>(axis)];
  double s = 0.0, freq = 2.0 * kPi, amp = 1.0;
  const double decay = std::pow(static_cast<double>(base), -beta0);
  for (int k = 0; k < n_terms; ++k) {
    s += amp * std::cos(freq * x + ph[static_cast<std::size_t>(k)]);
    freq *= base;
    amp *= decay;
  }
  return amplitude * s;
}

Eigen::VectorXd HolderForm::operator()(const Eigen::VectorXd& x) const {
  if (x.size() != n) throw ConfigError("HolderForm: dimension mismatch");
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = component(i, x(i));
  return v;
}

double HolderForm::sup_bound() const {
  const double r = std::pow(static_cast<double>(base), -beta0);
  return amplitude * (1.0 - std::pow(r, n_terms)) / (1.0 - r);
}

HolderForm synth_holder(double beta0, std::uint64_t seed, int n, int n_terms, bool unit_holder) {
  if (!(beta0 > 0.0 && beta0 <= 1.0)) throw ConfigError("synth_holder: beta0 must lie in (0, 1]");
  if (n < 1) throw ConfigError("synth_holder: n must be positive");
  if (n_terms < 0) throw ConfigError("synth_holder: n_terms must be nonnegative");
  HolderForm f;
  f.beta0 = beta0;
  f.seed = seed;
  f.n = n;
  f.n_terms = n_terms > 0 ? n_terms : (beta0 < 1.0 ? 22 : 4);
  Rng rng(seed);
  f.phases.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(f.n_terms), 0.0));
  for (auto& ax : f.phases)
    for (int k = 1; k < f.n_terms; ++k) ax[static_cast<std::size_t>(k)] = rng.uniform(0.0, 2.0 * kPi);
  if (unit_holder) {
    double m = 0.0;
    for (int level : {8, 10, 12}) m += median_cell_holder(f, 0, level, beta0);
    f.amplitude = 3.0 / m;
  }
  return f;
}

double median_cell_holder(const HolderForm& form, int axis, int level, double beta) {
  const long long nc = 1LL << level;
  const double side = 1.0 / static_cast<double>(nc);
  std::vector<double> r(static_cast<std::size_t>(nc));
  for (long long j = 0; j < nc; ++j) r[static_cast<std::size_t>(j)] = cell_range(form, axis, j, side);
  auto mid = r.begin() + static_cast<long>(r.size() / 2);
  std::nth_element(r.begin(), mid, r.end());
  return *mid / std::pow(side, beta);
}

std::vector<double> holder_ratios(const HolderForm& form, double beta, const std::vector<double>& scales,
                                  int pairs, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> xs(static_cast<std::size_t>(pairs));
  for (auto& x : xs) x = rng.uniform();
  std::vector<double> out;
  for (double s : scales) {
    double m = 0.0;
    for (double x : xs) m = std::max(m, std::abs(form.component(0, x + s) - form.component(0, x)));
    out.push_back(m / std::pow(s, beta));
  }
  return out;
}

long long box_count(const HolderForm& form, double omega, double alpha) {
  if (!(omega >= 4.0)) throw ConfigError("box_count: omega must be at least 4");
  if (!(alpha >= 0.5 && alpha < 1.0)) throw ConfigError("box_count: alpha must lie in [1/2, 1)");
  const double H = std::pow(omega, alpha);
  const long long nc = static_cast<long long>(std::ceil(H - 1e-9));
  if (nc > kMaxCells) throw ResolutionError("box_count: cells below the evaluator resolution");
  const double side = 1.0 / static_cast<double>(nc);
  long long total = 1;
  for (int axis = 0; axis < form.n; ++axis) {
    long long axis_count = 0;
    for (long long j = 0; j < nc; ++j) {
      const double range = omega * cell_range(form, axis, j, side);
      axis_count += static_cast<long long>(std::ceil(std::max(range, H) / H - 1e-12));
    }
    total *= axis_count;
  }
  return total;
}

AlphaScan optimal_alpha(const HolderForm& form, const std::vector<double>& omegas, const std::vector<double>& alphas) {
  std::vector<double> oms;
  for (double om : omegas)
    if (om >= 4.0) oms.push_back(om);
  if (oms.size() < 3) throw ConfigError("optimal_alpha: fewer than 3 valid omegas");
  if (alphas.empty()) throw ConfigError("optimal_alpha: empty alpha grid");
  // Fail before any work when the finest cover is out of reach.
  const double om_hi = *std::max_element(oms.begin(), oms.end());
  const double al_hi = *std::max_element(alphas.begin(), alphas.end());
  if (std::ceil(std::pow(om_hi, al_hi) - 1e-9) > static_cast<double>(kMaxCells))
    throw ResolutionError("optimal_alpha: cells below the evaluator resolution at the largest omega and alpha");
  AlphaScan scan;
  scan.alphas = alphas;
  scan.exponents.resize(alphas.size());
  scan.reports.resize(alphas.size() * oms.size());
  parallel_for(alphas.size() * oms.size(), [&](std::size_t i) {
    const double al = alphas[i / oms.size()], om = oms[i % oms.size()];
    scan.reports[i] = {om, al, box_count(form, om, al), 0.0};
  });
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    std::vector<double> lx, ly;
    for (std::size_t j = 0; j < oms.size(); ++j) {
      lx.push_back(std::log(oms[j]));
      ly.push_back(std::log(static_cast<double>(scan.reports[a * oms.size() + j].box_count)));
    }
    scan.exponents[a] = lsq_slope(lx, ly);
    for (std::size_t j = 0; j < oms.size(); ++j) scan.reports[a * oms.size() + j].E_alpha_fit = scan.exponents[a];
  }
  const auto it = std::min_element(scan.exponents.begin(), scan.exponents.end());
  scan.alpha_star = alphas[static_cast<std::size_t>(it - scan.exponents.begin())];
  scan.exponent_star = *it;
  return scan;
}

double regime_deviation(const AlphaScan& scan, double beta0, int n, double margin) {
  const double kink = 1.0 / (1.0 + beta0);
  double worst = 0.0;
  for (std::size_t i = 0; i < scan.alphas.size(); ++i) {
    const double a = scan.alphas[i];
    if (std::abs(a - kink) < margin) continue;
    const double expect = std::max(n * (1.0 - beta0 * a), n * a);
    worst = std::max(worst, std::abs(scan.exponents[i] - expect));
  }
  return worst;
}

PhasePoint straighten_phi(const HolderForm& form, const PhasePoint& rho) {
  if (rho.n() != form.n) throw ConfigError("straighten_phi: dimension mismatch");
  PhasePoint out = rho;
  for (int i = 0; i < form.n; ++i) out.xi(i) -= rho.omega * form.component(i, wrap01(rho.x(i)));
  return out;
}

PhasePoint straighten_phi_inverse(const HolderForm& form, const PhasePoint& rho) {
  if (rho.n() != form.n) throw ConfigError("straighten_phi_inverse: dimension mismatch");
  PhasePoint out = rho;
  for (int i = 0; i < form.n; ++i) out.xi(i) += rho.omega * form.component(i, wrap01(rho.x(i)));
  return out;
}

LipschitzReport lipschitz_unit_scale_test(const HolderForm& form, const MetricParams& p, std::size_t samples,
                                          std::uint64_t seed, double c_varpi, double omega_min, double omega_max) {
  if (!(omega_min > 0.0 && omega_max >= omega_min)) throw ConfigError("lipschitz_unit_scale_test: bad omega range");
  Rng rng(seed);
  const int n = form.n;
  const int dim = 2 * n + 2;
  LipschitzReport rep;
  rep.samples = samples;
  rep.c_varpi = c_varpi;
  for (std::size_t s = 0; s < samples; ++s) {
    PhasePoint a = PhasePoint::origin(n);
    const double om = std::pow(10.0, rng.uniform(std::log10(omega_min), std::log10(omega_max)));
    a.omega = rng.uniform() < 0.5 ? om : -om;
    a.z = rng.uniform();
    for (int i = 0; i < n; ++i) a.x(i) = rng.uniform();
    const double dp0 = delta_perp(std::abs(a.omega), p);
    for (int i = 0; i < n; ++i) a.xi(i) = a.omega * form.component(i, a.x(i)) + rng.normal() / dp0;
    // Tangent step of g_a length t along a random unit direction.
    const double en = a.eta_norm();
    const double dp = delta_perp(en, p), dq = delta_par(en, p);
    Eigen::VectorXd dir(dim);
    for (int i = 0; i < dim; ++i) dir(i) = rng.normal();
    dir *= std::pow(10.0, rng.uniform(-1.0, 2.0)) / dir.norm();
    Eigen::VectorXd c = a.coords();
    for (int i = 0; i < n; ++i) {
      c(i) += dp * dir(i);
      c(n + 1 + i) += dir(n + 1 + i) / dp;
    }
    c(n) += dq * dir(n);
    c(2 * n + 1) += dir(2 * n + 1) / dq;
    const PhasePoint b = PhasePoint::from_coords(n, c);
    const PhasePoint fa = straighten_phi(form, a), fb = straighten_phi(form, b);
    const double ratio = jbracket(g_dist(fa, fb, p)) / jbracket(g_dist(a, b, p));
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    if (ratio > c_varpi) ++rep.violations;
  }
  return rep;
}

}  // namespace ruelle
