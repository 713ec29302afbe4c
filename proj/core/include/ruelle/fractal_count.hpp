#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "ruelle/bracket_metric.hpp"

namespace ruelle {

// Weierstrass-type one-form per axis:
//   varpi_i(x) = amp sum_{k < n_terms} a^{-beta0 k} cos(2 pi a^k x_i + phase_{i,k}),
// with phase_{i,0} = 0 and the other phases drawn from the seed. Component i
// depends on x_i alone.
struct HolderForm {
  double beta0 = 0.5;
  std::uint64_t seed = 0;
  int base = 2;
  int n_terms = 22;
  int n = 1;
  double amplitude = 1.0;
  std::vector<std::vector<double>> phases;  // [axis][term]

  double component(int axis, double x) const;
  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const;
  // amp / (1 - a^{-beta0}) for infinite series; the finite sum bound here.
  double sup_bound() const;
};

// beta0 in (0, 1]. n_terms = 0 picks 22 terms for beta0 < 1 and 4 for
// beta0 = 1. With unit_holder the amplitude is set so that the median cell
// oscillation over side^beta0 is 1 at sides 2^-8, 2^-10, 2^-12 (mean of the
// three medians); otherwise amp = 1.
HolderForm synth_holder(double beta0, std::uint64_t seed, int n, int n_terms = 0, bool unit_holder = true);

// Median over cells of side 2^-level of (sampled oscillation) / side^beta.
double median_cell_holder(const HolderForm& form, int axis, int level, double beta);

// max over `pairs` random x of |varpi(x + s) - varpi(x)| / s^beta for each s
// (axis 0).
std::vector<double> holder_ratios(const HolderForm& form, double beta, const std::vector<double>& scales,
                                  int pairs, std::uint64_t seed);

struct BoxCoverReport {
  double omega = 0.0;
  double alpha = 0.0;
  long long box_count = 0;
  double E_alpha_fit = 0.0;  // slope over the omega sweep, filled by optimal_alpha
};

// Cells of side 1/ceil(omega^alpha) per axis; a cell needs
// ceil(max(range, omega^alpha) / omega^alpha) boxes along each xi axis,
// where range is the oscillation of omega varpi_i over 16 interior samples.
// By separability the count factorizes over axes. Throws ConfigError for
// omega < 4 or alpha outside [1/2, 1), ResolutionError when the cells fall
// below 2^-24.
long long box_count(const HolderForm& form, double omega, double alpha);

struct AlphaScan {
  std::vector<double> alphas;
  std::vector<double> exponents;  // E(alpha)
  std::vector<BoxCoverReport> reports;
  double alpha_star = 0.0;
  double exponent_star = 0.0;
};

// E(alpha) = least-squares slope of log N against log omega; alpha* is the
// argmin. Throws ConfigError with fewer than 3 usable omegas.
AlphaScan optimal_alpha(const HolderForm& form, const std::vector<double>& omegas, const std::vector<double>& alphas);

// Largest |E(alpha) - max(n(1 - beta0 alpha), n alpha)| over alphas at least
// `margin` away from the kink 1/(1+beta0).
double regime_deviation(const AlphaScan& scan, double beta0, int n, double margin = 0.1);

// Phi(x, z, xi, omega) = (x, z, xi - omega varpi(x), omega), with x read
// modulo 1.
PhasePoint straighten_phi(const HolderForm& form, const PhasePoint& rho);
PhasePoint straighten_phi_inverse(const HolderForm& form, const PhasePoint& rho);

struct LipschitzReport {
  std::size_t samples = 0;
  std::size_t violations = 0;
  double max_ratio = 0.0;  // max <|Phi rho' - Phi rho|_{g_Phi rho}> / <|rho' - rho|_{g_rho}>
  double c_varpi = 0.0;
};

// Pairs near the graph xi = omega varpi(x) with |omega| log-uniform in
// [omega_min, omega_max] and g-separations log-uniform in [0.1, 100]. A
// violation is a ratio above c_varpi; pass c_varpi = inf to calibrate.
LipschitzReport lipschitz_unit_scale_test(const HolderForm& form, const MetricParams& p, std::size_t samples,
                                          std::uint64_t seed, double c_varpi, double omega_min = 1e2,
                                          double omega_max = 1e8);

}  // namespace ruelle
