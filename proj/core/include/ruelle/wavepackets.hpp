#pragma once

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "ruelle/bracket_metric.hpp"
#include "ruelle/common.hpp"
#include "ruelle/torus.hpp"

namespace ruelle {

// ---------------------------------------------------------------------------
// Quadratic partition of unity on a torus grid.

// One chart: kappa is a translation by `shift` grid cells per axis (so
// det Dkappa = 1) and chi is sampled on the grid in chart coordinates.
struct Chart {
  Eigen::VectorXi shift;
  Eigen::VectorXd chi;
};

struct ChartAtlas {
  TorusGrid grid;
  std::vector<Chart> charts;

  // One chart, chi = 1.
  static ChartAtlas single(const TorusGrid& g);
  // Two charts covering the circle (d = 1): chi_1 = cos(theta), chi_2 = sin(theta)
  // composed with a smooth periodic step, the second chart shifted by N/2.
  static ChartAtlas circle_pair(const TorusGrid& g);

  // max over the grid of |sum_j (chi_j o kappa_j)^2 - 1|.
  double partition_defect() const;
};

// v_j = chi_j . (u o kappa_j^-1), in chart coordinates.
std::vector<Eigen::VectorXcd> chart_decompose(const ChartAtlas& atlas, const Eigen::VectorXcd& u);
// u = sum_j (chi_j o kappa_j) . (v_j o kappa_j).
Eigen::VectorXcd chart_recompose(const ChartAtlas& atlas, const std::vector<Eigen::VectorXcd>& v);

// ---------------------------------------------------------------------------
// Frequency-side construction of the exact packets.

// phi0_eta(eta') = exp(-|dp(eta)(xi'-xi)|^2/2 - |dq(eta)(omega'-omega)|^2/2),
// eta = (xi, omega) with omega last.
double packet_hat0(const Eigen::VectorXd& eta, const Eigen::VectorXd& eta_prime, const MetricParams& p);

// m(eta') = int phi0_eta(eta')^2 d eta, cached per lattice point.
class PacketNormalizer {
 public:
  PacketNormalizer(const MetricParams& p, int d);

  const MetricParams& params() const { return p_; }
  int dim() const { return d_; }

  double m(const Eigen::VectorXd& eta_prime) const;
  // Cached evaluation at an integer lattice point.
  double m_lattice(const Eigen::VectorXi& k) const;
  // pi^{d/2} / (dp^n dq), the value for a frequency-independent metric.
  double m_constant_metric(const Eigen::VectorXd& eta_prime) const;

  // Tensor Gauss-Hermite rule (32 nodes per axis) centred at eta' and scaled
  // by the local metric. Exact when the metric is constant on its support.
  double m_gauss_hermite(const Eigen::VectorXd& eta_prime) const;
  // Composite Gauss-Legendre rule split at the radii where delta stops being
  // capped (d = 1 on the line, d = 2 in polar coordinates).
  double m_split(const Eigen::VectorXd& eta_prime) const;
  // True when the Gauss-Hermite cloud at eta' meets a cap radius.
  bool near_cap(const Eigen::VectorXd& eta_prime) const;

 private:
  MetricParams p_;
  int d_;
  std::vector<double> caps_;
  std::vector<double> gh_nodes_, gh_scaled_weights_;
  mutable std::mutex mu_;
  mutable std::unordered_map<long long, double> cache_;
};

// phi_hat_eta(eta') = m(eta')^{-1/2} phi0_eta(eta').
double packet_hat(const PacketNormalizer& norm, const Eigen::VectorXd& eta, const Eigen::VectorXi& k);

// ||phi_rho||^2 = sum over the integer lattice of phi_hat_eta(k)^2. This is
// the L2 norm of the exact packet on the 2pi-periodic torus.
double exact_packet_norm_sq(const PacketNormalizer& norm, const Eigen::VectorXd& eta);

// ---------------------------------------------------------------------------
// Spatial packets on a torus grid.

enum class PacketKind { gaussian, exact };

// Cut-off chi: a product of smooth bumps equal to 1 on |s_i| <= b/2 and 0
// on |s_i| >= b, where b is the chart half width.
double chart_cutoff(double s, double half_width);

struct WavePacket {
  PhasePoint center;
  PacketKind kind;
  Eigen::VectorXcd samples;
  double normalization = 1.0;  // a_rho for the gaussian kind
};

// Gaussian kind: a chi(y'-y) e^{i eta.(y'-y)} exp(-|x'-x|^2/(2dp^2) - |z'-z|^2/(2dq^2)),
// a fixed so the grid L2 norm is 1. Exact kind: inverse transform of
// phi_hat_eta over the grid modes. Throws ResolutionError when 2 delta is
// under four grid cells or the exact spectrum leaves the grid's mode box.
WavePacket make_packet(const PhasePoint& rho, PacketKind kind, const PacketNormalizer& norm,
                       const TorusGrid& grid, double chart_half_width = kPi);

// ---------------------------------------------------------------------------
// Bargmann transform on a torus with a phase grid
//   { grid points } x { eta in h Z^d, |eta_i| <= L }.

struct PhaseGridSpec {
  TorusGrid grid;
  double h = 1.0;   // frequency lattice spacing
  double L = 0.0;   // frequency half width; 0 means N/2
};

// Transforms are evaluated mode by mode and throw ResolutionError for input
// carrying energy on the outermost modes of the grid box.
class TorusBargmann {
 public:
  TorusBargmann(std::shared_ptr<const PacketNormalizer> norm, PhaseGridSpec spec);

  const TorusGrid& grid() const { return spec_.grid; }
  const PhaseGridSpec& spec() const { return spec_; }
  const PacketNormalizer& normalizer() const { return *norm_; }
  // Frequency nodes, flattened row-major like grid modes.
  long eta_count() const;
  Eigen::VectorXd eta(long e) const;
  // Phase-cell weight (2pi/N)^d h^d / (2pi)^d.
  double cell_weight() const;

  // (Bu)(rho) = <phi_rho, u> for arbitrary phase points.
  std::vector<cplx> forward_points(const Eigen::VectorXcd& u, const std::vector<PhasePoint>& rhos) const;

  // Field on the structured phase grid: column e holds y -> (Bu)(y, eta_e).
  Eigen::MatrixXcd forward(const Eigen::VectorXcd& u) const;
  // Band-checked mode coefficients of u, entries under 1e-15 of the largest zeroed.
  Eigen::VectorXcd checked_modes(const Eigen::VectorXcd& u) const;
  // Column e of the field from checked mode coefficients; false (and a zero
  // column) when no packet at eta_e meets the spectrum of u.
  bool forward_column(const Eigen::VectorXcd& uh, long e, Eigen::VectorXcd& out) const;
  // sum_j |(Bu)(y_j, eta_e)|^2 without forming the column.
  double column_energy(const Eigen::VectorXcd& uh, long e) const;
  // B*v = sum over the phase grid of v(rho) phi_rho cell / (2pi)^d.
  Eigen::VectorXcd adjoint(const Eigen::MatrixXcd& v) const;

  // Mode norms m(k) over the grid box, computed once.
  const std::vector<double>& mode_norms() const;

  // Multiplier S_a(k) = sum_eta h^d a(eta) phi_hat_eta(k)^2, the diagonal of
  // B* a B for symbols depending on eta only.
  double mode_multiplier(const Eigen::VectorXi& k, const std::function<double(const Eigen::VectorXd&)>& a) const;

  // B*B u, evaluated mode by mode over the modes carried by u (relative
  // magnitude above 1e-13). Equals adjoint(forward(u)) up to round-off.
  Eigen::VectorXcd resolve_identity(const Eigen::VectorXcd& u) const;

 private:
  std::shared_ptr<const PacketNormalizer> norm_;
  PhaseGridSpec spec_;
  int per_axis_ = 0;  // frequency nodes per axis
  mutable std::vector<double> m_modes_;  // m at each grid mode, filled on first use
  mutable std::once_flag m_once_;
  void check_band(const Eigen::VectorXcd& uh) const;
};

// Rows (x..., z, xi..., omega, re, im, abs) for a field from TorusBargmann::forward.
void write_bargmann_csv(std::ostream& os, const TorusBargmann& b, const Eigen::MatrixXcd& field);

// Values of |<phi_rho, u>| for a plane wave u = e^{i omega0 z} on R^{n+1},
// computed with the gaussian kind packet by separable quadrature.
double gaussian_plane_wave_overlap(const PhasePoint& rho, double omega0, const MetricParams& p,
                                   double chart_half_width);

}  // namespace ruelle
