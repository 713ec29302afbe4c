#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ruelle/bracket_metric.hpp"
#include "ruelle/common.hpp"
#include "ruelle/escape.hpp"

namespace ruelle {

using Matrix2ll = Eigen::Matrix<long long, 2, 2>;
// Integer frequency nu on T^2.
using Nu = std::array<long long, 2>;

// Suspension of a hyperbolic toral automorphism f with constant roof 1 and
// zero potential: M = (T^2 x R) / ((m, z + 1) ~ (f m, z)). The transfer
// operator is L^t u(m, z) = u(m, z + t), so frequency nu on a slice moves to
// f^T nu after unit time.
struct MappingTorus {
  Matrix2ll f;
  double roof = 1.0;
  cplx potential{0.0, 0.0};

  static MappingTorus cat();
  // Throws ConfigError unless det f = 1, |trace f| > 2, roof = 1, potential = 0.
  void validate() const;
  double lambda() const;
  DualSplitting dual_split() const;

  Nu forward(const Nu& nu) const;   // f^T nu
  Nu backward(const Nu& nu) const;  // (f^T)^{-1} nu
  // Flow map on M in the fundamental domain [0,1)^2 x [0,1).
  Eigen::Vector3d flow(const Eigen::Vector3d& mz, double t) const;
};

struct SpectrumPoint {
  cplx z;
  std::string sector;
};

struct OrbitCertificate {
  Nu nu;  // orbit representative
  double norm_bound = 0.0;
  bool pass = false;
};

struct SpectrumResult {
  std::vector<SpectrumPoint> points;
  std::vector<OrbitCertificate> certificates;
  double threshold = 0.0;

  bool all_pass() const;
};

// {i 2 pi k : |k| <= K}, ordered by k.
SpectrumResult zero_sector_spectrum(int K);

// max over random (m, z) of |L^t phi_k - e^{i 2 pi k t} phi_k| with
// phi_k = e^{i 2 pi k z}, L^t evaluated through the flow on M.
double zero_sector_eigen_residual(const MappingTorus& mt, int k, double t, int samples, std::uint64_t seed);
// max |A phi_k - i 2 pi k phi_k| / max(1, 2 pi |k|) with A = d/dz applied
// spectrally on a 64-point z grid.
double zero_sector_generator_residual(int k);

// Points (f^T)^j nu for j in [-j_back, j_fwd], representative at index j_back.
struct FourierOrbit {
  Nu representative;
  std::vector<Nu> points;
  int j_back = 0;
  DualSplitting dual_split;
};

// Canonical representative: the orbit point of least |nu|, ties broken
// lexicographically.
Nu orbit_representative(const MappingTorus& mt, const Nu& nu);
// Orbit window extended at both ends until ||Xi_*||_g > min_gnorm, where
// Xi = 2 pi nu.
FourierOrbit build_orbit(const MappingTorus& mt, const Nu& nu, const MetricParams& p, double min_gnorm = 10.0);
// Representatives of all nonzero orbits meeting the disc |nu| <= nu_max.
std::vector<Nu> orbit_representatives(const MappingTorus& mt, double nu_max);

// Time-one transfer operator on one Fourier line, conjugated by W: a weighted
// shift with entries[j] = W(nu_{j+1}) / W(nu_j).
struct SectorOperator {
  std::vector<double> entries;

  Eigen::MatrixXd matrix() const;  // bidiagonal (subdiagonal) section
  double norm_bound() const;       // max entry: the norm of a weighted shift
};

// Throws ResolutionError when an end of the window is still within
// ||Xi_*||_g <= min_gnorm.
SectorOperator orbit_sector_operator(const FourierOrbit& orbit, const EscapeConfig& cfg, const MetricParams& p,
                                     double min_gnorm = 10.0);

// Zero sector for |k| <= K plus one certificate per orbit meeting |nu| <= nu_max.
SpectrumResult full_spectrum(const MappingTorus& mt, int K, double nu_max, const EscapeConfig& cfg,
                             const MetricParams& p, double threshold);
// Throws CertificateError naming every failing orbit.
void require_certified(const SpectrumResult& r);

// Points with Re z > gamma_re and Im z in [omega, omega + 1).
int weyl_count(const SpectrumResult& spec, double gamma_re, double omega);
// Least-squares slope of log max_{omega' <= omega} count(omega') against log omega.
double weyl_density_exponent(const SpectrumResult& spec, double gamma_re, const std::vector<double>& omegas,
                             double window_step = 0.25);

// Sparse Fourier coefficients in m of a function on a z slice.
using FourierSeries = std::map<Nu, cplx>;
FourierSeries transfer_time_one(const MappingTorus& mt, const FourierSeries& u);
// Coefficients of u on the orbit of nu.
FourierSeries project_orbit(const MappingTorus& mt, const FourierSeries& u, const Nu& nu);

struct WavefrontRecord {
  PhasePoint rho;
  double value = 0.0;   // |B_g phi_k|(rho)
  double weight = 1.0;  // W(rho)
  bool in_vicinity = false;
};

// Membership of the parabolic vicinity of E*_u + omega0 dz:
// <omega - omega0> <= |Xi|^eps and <|Xi|^{-alpha_perp} |Xi_s|> <= |Xi|^eps.
bool in_parabolic_vicinity(const PhasePoint& rho, double omega0, double eps, const DualSplitting& split,
                           const MetricParams& p);

// |B_g phi_k| on probe points (n = 2) with gaussian packets in a chart of
// half-width chart_half_width. Throws ResolutionError when a packet is wider
// than a fifth of the chart.
std::vector<WavefrontRecord> wavefront_profile(int k, const std::vector<PhasePoint>& probe, const MetricParams& p,
                                               const EscapeConfig& cfg, const DualSplitting& split,
                                               double eps = 0.5, double chart_half_width = 0.5);

// max value <omega - omega0>^N W over the records.
double wavefront_constant(const std::vector<WavefrontRecord>& rec, double omega0, double N);
// max value <Xi>^N over records outside the parabolic vicinity (0 if none).
double vicinity_constant(const std::vector<WavefrontRecord>& rec, double N);

}  // namespace ruelle
