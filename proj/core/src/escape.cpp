#include "ruelle/escape.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "ruelle/common.hpp"

namespace ruelle {

namespace {

constexpr int kAverageNodes = 64;
constexpr double kStepHalfWidth = 0.1;

Eigen::Vector2d xi2(const PhasePoint& rho) {
  if (rho.n() != 2) throw ConfigError("escape: phase points must have n = 2");
  return Eigen::Vector2d(rho.xi(0), rho.xi(1));
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

double log_bracket(double s) { return 0.5 * std::log1p(s * s); }

double log_h(const PhasePoint& rho, const DualSplitting&, const EscapeConfig& cfg, const MetricParams& p,
             double gamma) {
  const double dp = delta_perp(rho.eta_norm(), p);
  return std::log(cfg.h0) - gamma * log_bracket(dp * xi2(rho).norm());
}

double log_weight(const PhasePoint& rho, const DualSplitting& split, const EscapeConfig& cfg, const MetricParams& p) {
  const Eigen::Vector2d xi = xi2(rho);
  const double dp = delta_perp(rho.eta_norm(), p);
  if (cfg.variant == EscapeVariant::averaged) {
    const double a = projective_average(split.decompose(xi), split.lambda, cfg.t_avg);
    return cfg.r / (1.0 - p.alpha_perp) * a * log_bracket(dp * xi.norm());
  }
  const Eigen::Vector2d c = split.decompose(xi);
  const double h = std::exp(log_h(rho, split, cfg, p, cfg.gamma));
  return cfg.r_s * log_bracket(h * dp * std::abs(c(1))) - cfg.r_u * log_bracket(h * dp * std::abs(c(0)));
}

}  // namespace

DualSplitting DualSplitting::from_matrix(const Eigen::Matrix2d& f) {
  const double tr = f.trace();
  const double det = f.determinant();
  if (std::abs(det - 1.0) > 1e-12) throw ConfigError("DualSplitting: matrix must have determinant 1");
  if (!(std::abs(tr) > 2.0)) throw ConfigError("DualSplitting: matrix is not hyperbolic (|trace| <= 2)");
  const double disc = std::sqrt(tr * tr - 4.0);
  // Eigenvalues mu_+ = (tr + sign(tr) disc)/2 (expanding) and 1/mu_+.
  const double mu_u = 0.5 * (tr + std::copysign(disc, tr));
  const double mu_s = 1.0 / mu_u;
  const Eigen::Matrix2d ft = f.transpose();
  auto eigvec = [&](double mu) {
    // Null vector of ft - mu I from whichever row is better conditioned.
    const Eigen::Matrix2d m = ft - mu * Eigen::Matrix2d::Identity();
    Eigen::Vector2d v = m.row(0).norm() >= m.row(1).norm() ? Eigen::Vector2d(-m(0, 1), m(0, 0))
                                                           : Eigen::Vector2d(-m(1, 1), m(1, 0));
    v.normalize();
    if (v(0) < 0.0 || (v(0) == 0.0 && v(1) < 0.0)) v = -v;
    return v;
  };
  DualSplitting s;
  s.e_u_dual = eigvec(mu_u);
  s.e_s_dual = eigvec(mu_s);
  s.lambda = std::log(std::abs(mu_u));
  s.lambda_max = s.lambda;
  return s;
}

Eigen::Vector2d DualSplitting::decompose(const Eigen::Vector2d& xi) const {
  Eigen::Matrix2d b;
  b.col(0) = e_u_dual;
  b.col(1) = e_s_dual;
  return b.partialPivLu().solve(xi);
}

Eigen::Vector2d DualSplitting::recompose(double xi_u, double xi_s) const { return xi_u * e_u_dual + xi_s * e_s_dual; }

void EscapeConfig::validate() const {
  if (!(r_u >= 0.0) || !(r_s >= 0.0)) throw ConfigError("escape: r_u and r_s must be nonnegative");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("escape: gamma must lie in [0, 1)");
  if (!(gamma_prime >= 0.0 && gamma_prime <= gamma)) throw ConfigError("escape: gamma_prime must lie in [0, gamma]");
  if (!(h0 > 0.0)) throw ConfigError("escape: h0 must be positive");
  if (variant == EscapeVariant::averaged) {
    if (!(r >= 0.0)) throw ConfigError("escape: r must be nonnegative");
    if (!(t_avg > 0.0)) throw ConfigError("escape: t_avg must be positive");
  }
}

EscapeVariant parse_escape_variant(const std::string& s) {
  if (s == "W_lemma42" || s == "product") return EscapeVariant::product;
  if (s == "W2_appendixA" || s == "W2" || s == "averaged") return EscapeVariant::averaged;
  throw ConfigError("unknown escape variant '" + s + "'");
}

std::string to_string(EscapeVariant v) {
  return v == EscapeVariant::product ? "W_lemma42" : "W2_appendixA";
}

double h_gamma_perp(const PhasePoint& rho, const DualSplitting& split, const EscapeConfig& cfg,
                    const MetricParams& p, double gamma) {
  return std::exp(log_h(rho, split, cfg, p, gamma));
}

double h_gamma_perp(const PhasePoint& rho, const DualSplitting& split, const EscapeConfig& cfg,
                    const MetricParams& p) {
  return h_gamma_perp(rho, split, cfg, p, cfg.gamma);
}

double a0_profile(double psi) {
  const double t = (psi - (0.25 * kPi - kStepHalfWidth)) / (2.0 * kStepHalfWidth);
  return 2.0 * smooth_step(t) - 1.0;
}

double projective_average(const Eigen::Vector2d& xi_us, double lambda, double T) {
  const double u = std::abs(xi_us(0));
  const double s = std::abs(xi_us(1));
  if (u == 0.0 && s == 0.0) return 0.0;
  const double dt = 2.0 * T / (kAverageNodes - 1);
  double acc = 0.0;
  for (int i = 0; i < kAverageNodes; ++i) {
    const double t = -T + dt * i;
    const double psi = std::atan2(s * std::exp(-lambda * t), u * std::exp(lambda * t));
    const double w = (i == 0 || i == kAverageNodes - 1) ? 0.5 : 1.0;
    acc += w * a0_profile(psi);
  }
  return acc * dt / (2.0 * T);
}

double weight(const PhasePoint& rho, const DualSplitting& split, const EscapeConfig& cfg, const MetricParams& p) {
  return std::exp(log_weight(rho, split, cfg, p));
}

PhasePoint lift(const PhasePoint& rho, double t, const DualSplitting& split) {
  const Eigen::Vector2d c = split.decompose(xi2(rho));
  const Eigen::Vector2d xi = split.recompose(c(0) * std::exp(split.lambda * t), c(1) * std::exp(-split.lambda * t));
  PhasePoint out = rho;
  out.xi = Eigen::VectorXd(xi);
  return out;
}

double decay_ratio(const PhasePoint& rho, double t, const DualSplitting& split, const EscapeConfig& cfg,
                   const MetricParams& p) {
  return std::exp(log_weight(lift(rho, t, split), split, cfg, p) - log_weight(rho, split, cfg, p));
}

double fitted_decay_rate(const PhasePoint& rho, double t_max, int steps, const DualSplitting& split,
                         const EscapeConfig& cfg, const MetricParams& p) {
  if (steps < 3) throw ConfigError("fitted_decay_rate: need at least 3 steps");
  std::vector<double> ts, lw;
  for (int i = 0; i < steps; ++i) {
    const double t = t_max * i / (steps - 1);
    ts.push_back(t);
    lw.push_back(log_weight(lift(rho, t, split), split, cfg, p));
  }
  return -lsq_slope(ts, lw);
}

double escape_rate(const DualSplitting& split, const EscapeConfig& cfg, const MetricParams& p) {
  return split.lambda * (1.0 - cfg.gamma) * (1.0 - p.alpha_perp) * std::min(cfg.r_s, cfg.r_u);
}

double escape_rate_upper(const DualSplitting& split, const EscapeConfig& cfg, const MetricParams& p) {
  return split.lambda_max * (1.0 - cfg.gamma) * (1.0 - p.alpha_perp) * (cfg.r_s + cfg.r_u);
}

LowerBoundReport lower_bound_check(const DualSplitting& split, const EscapeConfig& cfg, const MetricParams& p,
                                   double calib_scale, double test_scale, double t_max) {
  constexpr int kAngles = 31;
  constexpr int kTimes = 101;
  LowerBoundReport rep;
  rep.lambda_prime = escape_rate_upper(split, cfg, p);
  // excess(S, theta, t) = -log ratio - Lambda' t; needed log C is its max.
  auto excesses = [&](double S, double theta) {
    PhasePoint rho = PhasePoint::origin(2);
    rho.xi = Eigen::VectorXd(split.recompose(S * std::cos(theta), S * std::sin(theta)));
    const double lw0 = log_weight(rho, split, cfg, p);
    std::vector<double> ex(kTimes);
    for (int i = 0; i < kTimes; ++i) {
      const double t = t_max * i / (kTimes - 1);
      ex[i] = lw0 - log_weight(lift(rho, t, split), split, cfg, p) - rep.lambda_prime * t;
    }
    return ex;
  };
  std::vector<double> scales;
  for (double S = 1.0; S <= test_scale * (1 + 1e-12); S *= 10.0) scales.push_back(S);
  rep.log_c = 0.0;
  for (double S : scales) {
    double need = 0.0;
    for (int a = 0; a < kAngles; ++a) {
      const auto ex = excesses(S, 0.5 * kPi * a / (kAngles - 1));
      need = std::max(need, *std::max_element(ex.begin(), ex.end()));
    }
    rep.needed_by_scale.emplace_back(S, need);
    if (S <= calib_scale * (1 + 1e-12)) rep.log_c = std::max(rep.log_c, need);
  }
  for (double S : scales) {
    if (S <= calib_scale * (1 + 1e-12)) continue;
    for (int a = 0; a < kAngles; ++a) {
      for (double e : excesses(S, 0.5 * kPi * a / (kAngles - 1))) {
        ++rep.samples;
        if (e > rep.log_c + 1e-9) {
          ++rep.violations;
          rep.worst_excess = std::max(rep.worst_excess, e - rep.log_c);
        }
      }
    }
  }
  return rep;
}

double order_estimate(const Eigen::Vector3d& direction, const DualSplitting& split, const EscapeConfig& cfg,
                      const MetricParams& p) {
  if (direction.norm() == 0.0) throw ConfigError("order_estimate: zero direction");
  std::vector<double> la, lw;
  for (int k = 4; k <= 12; ++k) {
    const double a = std::ldexp(1.0, k);
    PhasePoint rho = PhasePoint::origin(2);
    rho.xi(0) = a * direction(0);
    rho.xi(1) = a * direction(1);
    rho.omega = a * direction(2);
    la.push_back(std::log(a));
    lw.push_back(log_weight(rho, split, cfg, p));
  }
  return lsq_slope(la, lw);
}

double escape_temperate_constant(const DualSplitting& split, const EscapeConfig& cfg, const MetricParams& p,
                                 double N0, double eta_max, std::size_t samples, std::uint64_t seed) {
  Rng rng(seed);
  auto random_eta = [&](PhasePoint& r) {
    const double mag = std::pow(10.0, rng.uniform(-2.0, std::log10(eta_max)));
    Eigen::Vector3d dir(rng.normal(), rng.normal(), rng.normal());
    dir *= mag / dir.norm();
    r.xi(0) = dir(0);
    r.xi(1) = dir(1);
    r.omega = dir(2);
  };
  double worst = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    PhasePoint a = PhasePoint::origin(2), b = PhasePoint::origin(2);
    random_eta(a);
    if (rng.uniform() < 0.5) {
      random_eta(b);
    } else {
      const double sc = std::pow(10.0, rng.uniform(-1.0, 3.0));
      const double en = a.eta_norm();
      for (int j = 0; j < 2; ++j) b.xi(j) = a.xi(j) + sc * rng.normal() / delta_perp(en, p);
      b.omega = a.omega + sc * rng.normal() / delta_par(en, p);
    }
    for (int j = 0; j < 2; ++j) {
      a.x(j) = rng.uniform(-1.0, 1.0);
      b.x(j) = a.x(j) + rng.normal() * std::pow(10.0, rng.uniform(-3.0, 0.0));
    }
    const double lr = log_weight(b, split, cfg, p) - log_weight(a, split, cfg, p);
    const double d = h_gamma_perp(a, split, cfg, p, cfg.gamma_prime) * g_dist(a, b, p);
    worst = std::max(worst, std::exp(lr - N0 * log_bracket(d)));
  }
  return worst;
}

void write_weight_csv(std::ostream& os, const DualSplitting& split, const EscapeConfig& cfg, const MetricParams& p,
                      const std::vector<double>& xi_u, const std::vector<double>& xi_s,
                      const std::vector<double>& omega) {
  os << "xi_u,xi_s,omega,W\n";
  char buf[128];
  for (double om : omega) {
    for (double cs : xi_s) {
      for (double cu : xi_u) {
        PhasePoint rho = PhasePoint::origin(2);
        rho.xi = Eigen::VectorXd(split.recompose(cu, cs));
        rho.omega = om;
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", cu, cs, om, weight(rho, split, cfg, p));
        os << buf;
      }
    }
  }
}

}  // namespace ruelle
