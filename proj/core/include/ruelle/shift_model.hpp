#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ruelle/common.hpp"

namespace ruelle {

// Sequence on the integer window [j_min, j_max].
struct Sequence {
  int j_min = 0;
  std::vector<cplx> v;

  Sequence() = default;
  Sequence(int jmin, int jmax) : j_min(jmin), v(static_cast<std::size_t>(jmax - jmin + 1)) {}
  int j_max() const { return j_min + static_cast<int>(v.size()) - 1; }
  bool contains(int j) const { return j >= j_min && j <= j_max(); }
  cplx& operator[](int j) { return v[static_cast<std::size_t>(j - j_min)]; }
  cplx operator[](int j) const { return contains(j) ? v[static_cast<std::size_t>(j - j_min)] : cplx{}; }
  static Sequence delta(int jmin, int jmax, int at);
};

// Image of a sequence under a banded operator on a finite window. Rows whose
// value depends on entries outside the window are flagged invalid.
struct WindowImage {
  Sequence value;
  std::vector<bool> valid;
  bool is_valid(int j) const { return valid[static_cast<std::size_t>(j - value.j_min)]; }
};

// Bi-infinite operator with L_{j+1,j} = 1, L_{0,0} = w0, L_{2,0} = -1/w1 and
// weight W(j) = exp(-r j).
struct ShiftModel {
  cplx w0;
  cplx w1;
  double r = 0.0;
  int j_min = -50;
  int j_max = 50;

  // Throws ConfigError when w0 or w1 vanishes or the window misses [-2, 2].
  ShiftModel(cplx w0, cplx w1, double r, int j_min = -50, int j_max = 50);
};

WindowImage apply_L(const ShiftModel& m, const Sequence& u);
// Inverse: (L^-1)_{j,j+1} = 1, (L^-1)_{1,1} = 1/w1, (L^-1)_{-1,1} = -w0.
WindowImage apply_L_inverse(const ShiftModel& m, const Sequence& u);

// Max over interior rows and unit inputs of |(L L^-1 - Id) e_k|.
double inverse_residual(const ShiftModel& m);

// Eigenvector for w0: U_j = 0 (j<0), U_1 = U_0/w0, U_j = w0^-j (1 - w0/w1) U_0 (j>=2).
Sequence eigvec_U(const ShiftModel& m, cplx u0);
// Eigenvector for w1: V_j = 0 (j>=2), V_0 = w1 V_1, V_j = w1^{|j|+1} (1 - w0/w1) V_1 (j<=-1).
Sequence eigvec_V(const ShiftModel& m, cplx v1);

// Max over valid rows of |(L u - z u)_j| / (|u_{j-1}| + |z u_j| + sum of the
// perturbation terms feeding row j). Scale free, so geometric growth on the
// window does not hide or inflate errors.
double eigen_residual(const ShiftModel& m, const Sequence& u, cplx z);

enum class Membership { member, not_member, boundary };
std::string to_string(Membership m);

// Geometric tails: u_{j+1}/u_j -> ratio_plus as j -> +inf and
// u_{j-1}/u_j -> ratio_minus as j -> -inf. Zero encodes finite support.
struct GeometricTails {
  cplx ratio_plus{0.0, 0.0};
  cplx ratio_minus{0.0, 0.0};
};

GeometricTails tails_U(const ShiftModel& m);
GeometricTails tails_V(const ShiftModel& m);

// Membership in H_W(Z), ||u||^2 = sum |e^{-rj} u_j|^2, by the ratio test on
// both weighted tails. A weighted ratio equal to 1 (to 1e-12) is a boundary.
Membership hw_membership(const GeometricTails& tails, double r);

// Diag(W) L Diag(W)^-1 on the model window, rows/cols ordered j_min..j_max.
Eigen::MatrixXcd conjugated_LW(const ShiftModel& m);

struct FiniteSectionReport {
  int N = 0;
  std::vector<cplx> eigenvalues;
  std::vector<double> radii;            // sample radii e^{-r} + offset
  std::vector<double> resolvent_norms;  // max over 16 angles of ||(z - L)^-1||
  bool isolated_w0_found = false;       // some eigenvalue within 1e-6 of w0
  bool w0_outside_margin = false;       // |w0| > e^{-r} + 0.1
  double w0_distance = 0.0;             // distance from w0 to the nearest eigenvalue
  std::size_t outside_essential = 0;    // eigenvalues with modulus > e^{-r} + 1e-9
};

// N-truncation of the conjugated operator on [-N/2, N - N/2 - 1]; a
// diagnostic only. Resolvents are sampled at radii e^{-r} + offsets.
FiniteSectionReport finite_section_report(const ShiftModel& m, int N,
                                          const std::vector<double>& radius_offsets = {-0.05, 0.1, 0.2});

}  // namespace ruelle
