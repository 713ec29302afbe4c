#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace ruelle {

// <s> = (1 + s^2)^{1/2}.
double jbracket(double s);

// Admissible anisotropic metric on T*R^{n+1}:
//   g = (dx/dp)^2 + (dp dxi)^2 + (dz/dq)^2 + (dq domega)^2,
//   dp = min(delta0, |eta|^-alpha_perp), dq = min(delta0, |eta|^-alpha_par).
struct MetricParams {
  double delta0;
  double alpha_perp;
  double alpha_par;

  // Throws ConfigError unless delta0 > 0, 1/2 <= alpha_perp < 1 and
  // 0 <= alpha_par <= alpha_perp.
  MetricParams(double delta0, double alpha_perp, double alpha_par);
};

// rho = (y, eta) = ((x, z), (xi, omega)) with x, xi in R^n.
struct PhasePoint {
  Eigen::VectorXd x;
  double z = 0.0;
  Eigen::VectorXd xi;
  double omega = 0.0;

  PhasePoint() = default;
  PhasePoint(Eigen::VectorXd x, double z, Eigen::VectorXd xi, double omega);
  static PhasePoint origin(int n);

  int n() const { return static_cast<int>(x.size()); }
  // Euclidean norm of (xi, omega).
  double eta_norm() const;
  // Flat coordinates ordered (x, z, xi, omega), length 2(n+1).
  Eigen::VectorXd coords() const;
  static PhasePoint from_coords(int n, const Eigen::VectorXd& c);
};

double delta_perp(double eta_norm, const MetricParams& p);
double delta_par(double eta_norm, const MetricParams& p);

// g_rho norm of a tangent vector given in coords() order.
double g_norm(const PhasePoint& rho, const Eigen::VectorXd& v, const MetricParams& p);

// ||rho1 - rho0||_{g_rho0}. Not symmetric.
double g_dist(const PhasePoint& rho0, const PhasePoint& rho1, const MetricParams& p);

// Delta(rho) = min(delta0^{1/alpha_perp}, |eta|^-1)^{1 - alpha_perp}.
double distortion(const PhasePoint& rho, const MetricParams& p);

struct InequalityTally {
  std::string name;
  std::size_t samples = 0;
  std::size_t violations = 0;
  double worst_ratio = 0.0;  // max of lhs/rhs over the sample
};

// Random sampling of the bracket inequalities <s+t> <= <s>+<t>,
// <st> <= <s><t>, <t/s> >= <t>/<s>, <s>^th <= <|s|^th> <= sqrt2 <s>^th,
// the two-step bound <s'>/<s> <= 2<(s'-s)/<s>> <= 2<s'-s>, and
// <s'>/<s> <= 4^{1/(1-th)} <|s'-s|/<s'>^th>^{1/(1-th)} for
// th in {0, 0.3, 0.7, 0.9}. Comparisons allow 1e-13 relative round-off.
std::vector<InequalityTally> fuzz_bracket_inequalities(std::uint64_t seed, std::size_t samples);

// Largest observed ||v||_{g2}/||v||_{g1} / <Delta(rho1)^gamma ||rho2-rho1||_{g1}>^N
// over random (rho1, rho2, v) with |eta| log-uniform in [1e-2, eta_max].
double metric_temperate_constant(const MetricParams& p, int n, double gamma, int N,
                                 double eta_max, std::size_t samples, std::uint64_t seed);

}  // namespace ruelle
