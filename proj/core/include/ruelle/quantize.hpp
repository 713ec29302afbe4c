#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ruelle/bracket_metric.hpp"
#include "ruelle/wavepackets.hpp"

namespace ruelle {

using PhaseFunction = std::function<double(const PhasePoint&)>;

// A symbol with an optional slow-variation certificate
//   |a(r') - a(r)| <= h(r) <||r' - r||_{g_r}>^{N0}.
struct Symbol {
  std::function<cplx(const PhasePoint&)> a;
  PhaseFunction h;
  double N0 = 0.0;

  bool certified() const { return static_cast<bool>(h); }
};

Symbol constant_symbol(cplx c);
// Pointwise product; the certificate is dropped.
Symbol product(const Symbol& a, const Symbol& b);

// Phase point (y_j, eta) on a grid.
PhasePoint grid_phase_point(const TorusGrid& g, long j, const Eigen::VectorXd& eta);

// Translation flow phi^t(y) = y + v t on the torus. The transfer operator is
// L^t u = u o phi^{-t} and the lifted flow is (y, eta) -> (y + v t, eta).
struct TranslationFlow {
  Eigen::VectorXd velocity;

  PhasePoint lift(const PhasePoint& rho, double t) const;
  // L^t on mode coefficients: uhat_k -> e^{-i k.v t} uhat_k.
  Eigen::VectorXcd transfer_modes(const TorusGrid& g, const Eigen::VectorXcd& uh, double t) const;
};

// Anti-Wick quantization on a structured phase grid. Dense matrices act on
// the mode coefficients with |k_i| <= band, an orthonormal basis for the L2
// norm; the band is kept clear of the phase grid's frequency edge so that
// Op(1) is the identity there up to the resolution floor.
class Quantizer {
 public:
  Quantizer(std::shared_ptr<const TorusBargmann> b, int band);

  const TorusBargmann& bargmann() const { return *b_; }
  long dim() const { return static_cast<long>(basis_.size()); }
  // Flattened grid-mode index of each basis vector.
  const std::vector<long>& basis() const { return basis_; }
  Eigen::VectorXcd to_basis(const Eigen::VectorXcd& uh) const;
  Eigen::VectorXcd from_basis(const Eigen::VectorXcd& c) const;

  // Op(a) u = B*(a . Bu) on grid samples, without band compression.
  Eigen::VectorXcd apply(const Symbol& a, const Eigen::VectorXcd& u) const;
  // Band compression of Op(a) as a dense matrix.
  Eigen::MatrixXcd matrix(const Symbol& a) const;
  // sup over the phase grid of |f|.
  double sup(const PhaseFunction& f) const;
  // sum over the phase grid of a(rho) ||phi_rho||^2 cell / (2pi)^d.
  cplx trace_formula(const Symbol& a) const;
  // L^t on the band, diagonal in modes.
  Eigen::VectorXcd transfer_diagonal(const TranslationFlow& flow, double t) const;

 private:
  std::shared_ptr<const TorusBargmann> b_;
  std::vector<long> basis_;
  // Basis positions carrying phi_hat_eta above round-off, per frequency node.
  std::vector<std::vector<std::pair<long, double>>> support_;
};

// ||u||_{H_W} = ||W . Bu|| over the phase grid. With frequency_only the
// weight is read once per frequency node (at y = 0).
double sobolev_norm(const TorusBargmann& b, const Eigen::VectorXcd& u, const PhaseFunction& weight,
                    bool frequency_only = false);

// H_W realized on mode coefficients: ||u||_W^2 = u* G u with G = Op(W^2).
struct WeightedSpace {
  PhaseFunction weight;
  Eigen::MatrixXcd gram;
  Eigen::MatrixXcd sqrt_gram;
  Eigen::MatrixXcd inv_sqrt_gram;

  static WeightedSpace build(const Quantizer& q, const PhaseFunction& weight);
  double norm(const Eigen::VectorXcd& uh) const;
};

// 50-step power iteration for the spectral norm of a dense matrix.
double power_norm(const Eigen::MatrixXcd& m, int steps = 50, std::uint64_t seed = 7);
// Operator norm on H_W: ||G^{1/2} T G^{-1/2}|| by power iteration.
double weighted_norm(const WeightedSpace& sp, const Eigen::MatrixXcd& t, int steps = 50, std::uint64_t seed = 7);

// T^dagger v = G^{-1} T* G v with G inverted by conjugate gradients.
Eigen::VectorXcd hw_adjoint_apply(const WeightedSpace& sp, const Eigen::MatrixXcd& t, const Eigen::VectorXcd& v);
// Largest |<Tu, v>_G - <u, T^dagger v>_G| / (||Tu||_G ||v||_G + ||u||_G ||T^dagger v||_G)
// over random pairs.
double hw_adjoint_defect(const WeightedSpace& sp, const Eigen::MatrixXcd& t, int pairs, std::uint64_t seed);

struct ProbeRecord {
  std::string probe;
  std::vector<std::pair<std::string, double>> params;
  double residual = 0.0;
  double bound = 0.0;
  bool pass = false;
};

// ||Op(a)Op(b) - Op(ab)||_W against C ||a h_b||_inf + f sup|a| sup|b|, where
// f = ||Op(1) - I||_W is the resolution floor of the band.
ProbeRecord composition_residual(const Quantizer& q, const WeightedSpace& sp, const Symbol& a, const Symbol& b,
                                 double C);

// ||L^t Op(a o lift^t) - Op(a) L^t||_W against C_t ||(W o lift^t / W) h||_inf.
ProbeRecord egorov_residual(const Quantizer& q, const WeightedSpace& sp, const Symbol& a, double t,
                            const TranslationFlow& flow, double C_t);

struct MicrolocalitySample {
  double distance;  // ||rho' - lift^t(rho)||_{g_rho'}, torus-wrapped
  double value;     // |<phi_rho', L^t phi_rho>|
};

struct MicrolocalityFit {
  double on_graph = 0.0;        // value at rho' = lift^t(rho)
  double decay_exponent = 0.0;  // N from log value ~ -N log <distance>
  std::vector<MicrolocalitySample> samples;

  // on_graph over the largest value with distance >= dmin.
  double ratio_beyond(double dmin) const;
};

// Probe points around center at the given g-distances along every phase-space
// axis and both diagonals of each (y_i, eta_i) pair.
std::vector<PhasePoint> microlocality_probe_grid(const PhasePoint& center, const MetricParams& p,
                                                 const std::vector<double>& distances);

// Exact packet overlaps on the 2pi-periodic torus, by lattice sums. The fit
// uses samples with distance in [fit_lo, fit_hi]; throws ConfigError when
// fewer than three samples fall there.
MicrolocalityFit microlocality_probe(const PacketNormalizer& norm, const PhasePoint& rho, double t,
                                     const TranslationFlow& flow, const std::vector<PhasePoint>& probes,
                                     double fit_lo = 3.0, double fit_hi = 10.0);

}  // namespace ruelle
