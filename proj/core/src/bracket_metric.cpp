#include "ruelle/bracket_metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ruelle/common.hpp"

namespace ruelle {

double jbracket(double s) { return std::hypot(1.0, s); }

MetricParams::MetricParams(double d0, double ap, double aq)
    : delta0(d0), alpha_perp(ap), alpha_par(aq) {
  if (!(d0 > 0.0) || !std::isfinite(d0)) throw ConfigError("delta0 must be positive");
  if (!(ap >= 0.5 && ap < 1.0)) throw ConfigError("alpha_perp must lie in [1/2, 1)");
  if (!(aq >= 0.0 && aq <= ap)) throw ConfigError("alpha_par must lie in [0, alpha_perp]");
}

PhasePoint::PhasePoint(Eigen::VectorXd x_, double z_, Eigen::VectorXd xi_, double omega_)
    : x(std::move(x_)), z(z_), xi(std::move(xi_)), omega(omega_) {
  if (x.size() != xi.size()) throw ConfigError("PhasePoint: x and xi differ in dimension");
}

PhasePoint PhasePoint::origin(int n) {
  return PhasePoint(Eigen::VectorXd::Zero(n), 0.0, Eigen::VectorXd::Zero(n), 0.0);
}

double PhasePoint::eta_norm() const {
  return std::sqrt(xi.squaredNorm() + omega * omega);
}

Eigen::VectorXd PhasePoint::coords() const {
  const int k = n();
  Eigen::VectorXd c(2 * k + 2);
  c.segment(0, k) = x;
  c(k) = z;
  c.segment(k + 1, k) = xi;
  c(2 * k + 1) = omega;
  return c;
}

PhasePoint PhasePoint::from_coords(int n, const Eigen::VectorXd& c) {
  if (c.size() != 2 * n + 2) throw ConfigError("PhasePoint::from_coords: length mismatch");
  return PhasePoint(c.segment(0, n), c(n), c.segment(n + 1, n), c(2 * n + 1));
}

namespace {
// |eta|^-alpha with the convention 0^-alpha = +inf (and |eta|^0 = 1).
double capped_power(double eta_norm, double alpha, double delta0) {
  if (alpha == 0.0) return std::min(delta0, 1.0);
  if (eta_norm <= 0.0) return delta0;
  return std::min(delta0, std::pow(eta_norm, -alpha));
}
}  // namespace

double delta_perp(double eta_norm, const MetricParams& p) {
  return capped_power(eta_norm, p.alpha_perp, p.delta0);
}

double delta_par(double eta_norm, const MetricParams& p) {
  return capped_power(eta_norm, p.alpha_par, p.delta0);
}

double g_norm(const PhasePoint& rho, const Eigen::VectorXd& v, const MetricParams& p) {
  const int k = rho.n();
  if (v.size() != 2 * k + 2) throw ConfigError("g_norm: tangent vector has wrong dimension");
  const double en = rho.eta_norm();
  const double dp = delta_perp(en, p);
  const double dq = delta_par(en, p);
  double s = v.segment(0, k).squaredNorm() / (dp * dp);
  s += v(k) * v(k) / (dq * dq);
  s += v.segment(k + 1, k).squaredNorm() * dp * dp;
  s += v(2 * k + 1) * v(2 * k + 1) * dq * dq;
  return std::sqrt(s);
}

double g_dist(const PhasePoint& rho0, const PhasePoint& rho1, const MetricParams& p) {
  if (rho0.n() != rho1.n()) throw ConfigError("g_dist: dimension mismatch");
  return g_norm(rho0, rho1.coords() - rho0.coords(), p);
}

double distortion(const PhasePoint& rho, const MetricParams& p) {
  const double en = rho.eta_norm();
  const double cap = std::pow(p.delta0, 1.0 / p.alpha_perp);
  const double inv = en > 0.0 ? 1.0 / en : std::numeric_limits<double>::infinity();
  return std::pow(std::min(cap, inv), 1.0 - p.alpha_perp);
}

namespace {

double sample_real(Rng& rng) {
  // Mixture of O(1) values and values spread over twelve decades.
  double mag = rng.uniform() < 0.3 ? rng.uniform(0.0, 3.0) : std::pow(10.0, rng.uniform(-6.0, 6.0));
  return rng.uniform() < 0.5 ? -mag : mag;
}

struct Tally {
  InequalityTally t;
  void check(double lhs, double rhs) {
    ++t.samples;
    double r = lhs / rhs;
    t.worst_ratio = std::max(t.worst_ratio, r);
    if (lhs > rhs * (1.0 + 1e-13)) ++t.violations;
  }
};

}  // namespace

std::vector<InequalityTally> fuzz_bracket_inequalities(std::uint64_t seed, std::size_t samples) {
  Rng rng(seed);
  const double thetas[] = {0.0, 0.3, 0.7, 0.9};
  Tally sum{{"sum"}}, prod{{"prod"}}, prod2{{"prod2"}}, pow_lo{{"power_lower"}},
      pow_hi{{"power_upper"}}, jb1a{{"jb1_first"}}, jb1b{{"jb1_second"}};
  Tally jb2[4] = {{{"jb2_theta0"}}, {{"jb2_theta0.3"}}, {{"jb2_theta0.7"}}, {{"jb2_theta0.9"}}};

  for (std::size_t i = 0; i < samples; ++i) {
    const double s = sample_real(rng);
    const double t = sample_real(rng);
    sum.check(jbracket(s + t), jbracket(s) + jbracket(t));
    prod.check(jbracket(s * t), jbracket(s) * jbracket(t));
    if (s != 0.0) prod2.check(jbracket(t) / jbracket(s), jbracket(t / s));
    const double th = rng.uniform(0.0, 1.0);
    const double bs_th = std::pow(jbracket(s), th);
    const double mid = jbracket(std::pow(std::abs(s), th));
    pow_lo.check(bs_th, mid);
    pow_hi.check(mid, std::sqrt(2.0) * bs_th);

    const double sp = t;  // s'
    const double ratio = jbracket(sp) / jbracket(s);
    const double m1 = 2.0 * jbracket((sp - s) / jbracket(s));
    jb1a.check(ratio, m1);
    jb1b.check(m1, 2.0 * jbracket(sp - s));
    for (int k = 0; k < 4; ++k) {
      const double e = 1.0 / (1.0 - thetas[k]);
      const double rhs =
          std::pow(4.0, e) * std::pow(jbracket(std::abs(sp - s) / std::pow(jbracket(sp), thetas[k])), e);
      jb2[k].check(ratio, rhs);
    }
  }
  std::vector<InequalityTally> out{sum.t, prod.t, prod2.t, pow_lo.t, pow_hi.t, jb1a.t, jb1b.t};
  for (auto& j : jb2) out.push_back(j.t);
  return out;
}

double metric_temperate_constant(const MetricParams& p, int n, double gamma, int N, double eta_max,
                                 std::size_t samples, std::uint64_t seed) {
  Rng rng(seed);
  const int dim = 2 * n + 2;
  auto random_eta = [&](Eigen::VectorXd& xi, double& om) {
    const double r = std::pow(10.0, rng.uniform(-2.0, std::log10(eta_max)));
    Eigen::VectorXd dir(n + 1);
    for (int i = 0; i <= n; ++i) dir(i) = rng.normal();
    dir *= r / dir.norm();
    xi = dir.head(n);
    om = dir(n);
  };
  double worst = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    PhasePoint a = PhasePoint::origin(n), b = PhasePoint::origin(n);
    random_eta(a.xi, a.omega);
    if (rng.uniform() < 0.5) {
      random_eta(b.xi, b.omega);
    } else {
      // Nearby frequency at a random multiple of the local metric scale.
      const double sc = std::pow(10.0, rng.uniform(-1.0, 3.0));
      const double en = a.eta_norm();
      for (int j = 0; j < n; ++j) b.xi(j) = a.xi(j) + sc * rng.normal() / delta_perp(en, p);
      b.omega = a.omega + sc * rng.normal() / delta_par(en, p);
    }
    for (int j = 0; j < n; ++j) {
      a.x(j) = rng.uniform(-1.0, 1.0);
      b.x(j) = a.x(j) + rng.normal() * std::pow(10.0, rng.uniform(-3.0, 0.0));
    }
    a.z = rng.uniform(-1.0, 1.0);
    b.z = a.z + rng.normal() * std::pow(10.0, rng.uniform(-3.0, 0.0));
    Eigen::VectorXd v(dim);
    for (int j = 0; j < dim; ++j) v(j) = rng.normal();
    const double ratio = g_norm(b, v, p) / g_norm(a, v, p);
    const double d = std::pow(distortion(a, p), gamma) * g_dist(a, b, p);
    worst = std::max(worst, ratio / std::pow(jbracket(d), N));
  }
  return worst;
}

}  // namespace ruelle
