#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ruelle/bracket_metric.hpp"

namespace ruelle {

// Dual splitting of a linear hyperbolic model on R^2 x R_z. Covectors are
// eta = (xi, omega) with xi = xi_u e_u + xi_s e_s; the Anosov form is dz, so
// E*_0 is the omega axis and Xi_* = xi.
struct DualSplitting {
  Eigen::Vector2d e_u_dual;
  Eigen::Vector2d e_s_dual;
  Eigen::Vector3d anosov_form{0.0, 0.0, 1.0};
  double lambda = 0.0;
  double lambda_max = 0.0;

  // Unit eigencovectors of f^T, first coordinate positive. f must be
  // hyperbolic with det 1.
  static DualSplitting from_matrix(const Eigen::Matrix2d& f);

  // Coefficients (xi_u, xi_s) with xi = xi_u e_u + xi_s e_s.
  Eigen::Vector2d decompose(const Eigen::Vector2d& xi) const;
  Eigen::Vector2d recompose(double xi_u, double xi_s) const;
};

// product: R_s log<h dp Xi_s> - R_u log<h dp Xi_u>; averaged: projective average of
// a cone step over [-T, T]. Config names are W_lemma42 and W2_appendixA.
enum class EscapeVariant { product, averaged };

struct EscapeConfig {
  double r_u = 2.0;
  double r_s = 2.0;
  double gamma = 0.0;
  double gamma_prime = 0.0;
  double h0 = 1.0;
  EscapeVariant variant = EscapeVariant::product;
  // W2 only: order r and averaging half-time T.
  double r = 1.0;
  double t_avg = 2.0;

  // Throws ConfigError on out-of-range fields.
  void validate() const;
};

EscapeVariant parse_escape_variant(const std::string& s);
std::string to_string(EscapeVariant v);

// Phase points here have n = 2 and only the covector part is read.
double h_gamma_perp(const PhasePoint& rho, const DualSplitting& split, const EscapeConfig& cfg,
                    const MetricParams& p, double gamma);
double h_gamma_perp(const PhasePoint& rho, const DualSplitting& split, const EscapeConfig& cfg,
                    const MetricParams& p);

// Smoothed projective step: -1 for psi <= pi/4 - 0.1, +1 for psi >= pi/4 + 0.1,
// with psi in [0, pi/2] the angle of (|xi_u|, |xi_s|).
double a0_profile(double psi);
// (1/2T) int_{-T}^{T} a0(psi(t)) dt by the 64-node trapezoid rule, where
// tan psi(t) = e^{-2 lambda t} |xi_s| / |xi_u|. Zero covector gives 0.
double projective_average(const Eigen::Vector2d& xi_us, double lambda, double T);

double weight(const PhasePoint& rho, const DualSplitting& split, const EscapeConfig& cfg, const MetricParams& p);

// Lifted flow of the linear model: xi_u -> e^{lt} xi_u, xi_s -> e^{-lt} xi_s,
// omega fixed. The base point is left in place since W ignores it.
PhasePoint lift(const PhasePoint& rho, double t, const DualSplitting& split);

double decay_ratio(const PhasePoint& rho, double t, const DualSplitting& split, const EscapeConfig& cfg,
                   const MetricParams& p);

// Decay rate -d log W / dt along the lifted flow: least-squares slope over
// `steps` equally spaced t in [0, t_max].
double fitted_decay_rate(const PhasePoint& rho, double t_max, int steps, const DualSplitting& split,
                         const EscapeConfig& cfg, const MetricParams& p);

// Lambda = lambda (1-gamma)(1-alpha_perp) min(R_s, R_u) and
// Lambda' = lambda_max (1-gamma)(1-alpha_perp)(R_s + R_u).
double escape_rate(const DualSplitting& split, const EscapeConfig& cfg, const MetricParams& p);
double escape_rate_upper(const DualSplitting& split, const EscapeConfig& cfg, const MetricParams& p);

struct LowerBoundReport {
  double lambda_prime = 0.0;
  double log_c = 0.0;          // max of -log(ratio) - Lambda' t over the calibration set
  std::size_t samples = 0;     // test set size
  std::size_t violations = 0;  // test samples with -log(ratio) - Lambda' t > log_c
  double worst_excess = 0.0;   // largest such excess over log_c
  std::vector<std::pair<double, double>> needed_by_scale;  // (|Xi|, needed log C)
};

// Checks W(lift^t rho)/W(rho) >= C^{-1} e^{-Lambda' t} for t in [0, t_max].
// log C is calibrated over starting points with |Xi| <= calib_scale and then
// held fixed while the scale grows to test_scale. Directions sweep the
// (xi_u, xi_s) quadrant.
LowerBoundReport lower_bound_check(const DualSplitting& split, const EscapeConfig& cfg, const MetricParams& p,
                                   double calib_scale, double test_scale, double t_max);

// Least-squares slope of log W(a Xi) against log a over a = 2^4..2^12.
// The covector is (xi, omega) with xi in R^2.
double order_estimate(const Eigen::Vector3d& direction, const DualSplitting& split, const EscapeConfig& cfg,
                      const MetricParams& p);

// Largest W(rho')/W(rho) / <h_{gamma'}(rho) ||rho' - rho||_{g_rho}>^{N0} over
// random pairs with |eta| log-uniform up to eta_max.
double escape_temperate_constant(const DualSplitting& split, const EscapeConfig& cfg, const MetricParams& p,
                                 double N0, double eta_max, std::size_t samples, std::uint64_t seed);

// CSV rows xi_u,xi_s,omega,W on a rectangular grid of dual coordinates.
void write_weight_csv(std::ostream& os, const DualSplitting& split, const EscapeConfig& cfg, const MetricParams& p,
                      const std::vector<double>& xi_u, const std::vector<double>& xi_s,
                      const std::vector<double>& omega);

}  // namespace ruelle
