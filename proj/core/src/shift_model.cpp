#include "ruelle/shift_model.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace ruelle {

Sequence Sequence::delta(int jmin, int jmax, int at) {
  Sequence s(jmin, jmax);
  s[at] = 1.0;
  return s;
}

ShiftModel::ShiftModel(cplx w0_, cplx w1_, double r_, int jmin, int jmax)
    : w0(w0_), w1(w1_), r(r_), j_min(jmin), j_max(jmax) {
  if (std::abs(w0) == 0.0 || std::abs(w1) == 0.0) throw ConfigError("w0 and w1 must be nonzero");
  if (jmin > -2 || jmax < 2) throw ConfigError("window must contain [-2, 2]");
  if (!std::isfinite(r)) throw ConfigError("r must be finite");
}

namespace {
WindowImage make_image(const Sequence& u) {
  WindowImage img{Sequence(u.j_min, u.j_max()), std::vector<bool>(u.v.size(), true)};
  return img;
}
}  // namespace

WindowImage apply_L(const ShiftModel& m, const Sequence& u) {
  WindowImage img = make_image(u);
  for (int j = u.j_min; j <= u.j_max(); ++j) {
    if (u.contains(j - 1)) img.value[j] += u[j - 1];
  }
  if (u.contains(0)) img.value[0] += m.w0 * u[0];
  if (u.contains(2) && u.contains(0)) img.value[2] += -u[0] / m.w1;
  // Row j_min needs u_{j_min - 1}.
  img.valid[0] = false;
  return img;
}

WindowImage apply_L_inverse(const ShiftModel& m, const Sequence& u) {
  WindowImage img = make_image(u);
  for (int j = u.j_min; j <= u.j_max(); ++j) {
    if (u.contains(j + 1)) img.value[j] += u[j + 1];
  }
  if (u.contains(1)) {
    img.value[1] += u[1] / m.w1;
    if (u.contains(-1)) img.value[-1] += -m.w0 * u[1];
  }
  img.valid.back() = false;
  return img;
}

double inverse_residual(const ShiftModel& m) {
  double worst = 0.0;
  for (int k = m.j_min; k <= m.j_max; ++k) {
    Sequence e = Sequence::delta(m.j_min, m.j_max, k);
    WindowImage a = apply_L_inverse(m, e);
    WindowImage b = apply_L(m, a.value);
    for (int j = m.j_min + 1; j < m.j_max; ++j) {
      // Row j of L L^-1 reads rows j-1 and (at 2) 0 of L^-1 e, all valid here.
      double err = std::abs(b.value[j] - e[j]);
      worst = std::max(worst, err);
    }
  }
  return worst;
}

Sequence eigvec_U(const ShiftModel& m, cplx u0) {
  Sequence U(m.j_min, m.j_max);
  const cplx tail = (1.0 - m.w0 / m.w1) * u0;
  for (int j = 0; j <= m.j_max; ++j) {
    if (j == 0) U[j] = u0;
    else if (j == 1) U[j] = u0 / m.w0;
    else U[j] = tail / std::pow(m.w0, j);
  }
  return U;
}

Sequence eigvec_V(const ShiftModel& m, cplx v1) {
  Sequence V(m.j_min, m.j_max);
  const cplx tail = (1.0 - m.w0 / m.w1) * v1;
  for (int j = m.j_min; j <= 1; ++j) {
    if (j == 1) V[j] = v1;
    else if (j == 0) V[j] = m.w1 * v1;
    else V[j] = std::pow(m.w1, std::abs(j) + 1) * tail;
  }
  return V;
}

double eigen_residual(const ShiftModel& m, const Sequence& u, cplx z) {
  WindowImage img = apply_L(m, u);
  double worst = 0.0;
  for (int j = u.j_min; j <= u.j_max(); ++j) {
    if (!img.is_valid(j)) continue;
    double scale = std::abs(u[j - 1]) + std::abs(z * u[j]);
    if (j == 0) scale += std::abs(m.w0 * u[0]);
    if (j == 2) scale += std::abs(u[0] / m.w1);
    const double err = std::abs(img.value[j] - z * u[j]);
    if (scale > 0.0) worst = std::max(worst, err / scale);
    else worst = std::max(worst, err);
  }
  return worst;
}

std::string to_string(Membership m) {
  switch (m) {
    case Membership::member: return "member";
    case Membership::not_member: return "not_member";
    case Membership::boundary: return "boundary";
  }
  return "unknown";
}

GeometricTails tails_U(const ShiftModel& m) {
  GeometricTails t;
  if (m.w0 != m.w1) t.ratio_plus = 1.0 / m.w0;
  return t;
}

GeometricTails tails_V(const ShiftModel& m) {
  GeometricTails t;
  if (m.w0 != m.w1) t.ratio_minus = m.w1;
  return t;
}

Membership hw_membership(const GeometricTails& tails, double r) {
  // Weighted ratios: e^{-r}|ratio_plus| at +inf, e^{r}|ratio_minus| at -inf.
  const double plus = std::exp(-r) * std::abs(tails.ratio_plus);
  const double minus = std::exp(r) * std::abs(tails.ratio_minus);
  bool boundary = false, divergent = false;
  for (double q : {plus, minus}) {
    if (std::abs(q - 1.0) <= 1e-12) boundary = true;
    else if (q > 1.0) divergent = true;
  }
  if (divergent) return Membership::not_member;
  if (boundary) return Membership::boundary;
  return Membership::member;
}

Eigen::MatrixXcd conjugated_LW(const ShiftModel& m) {
  const int n = m.j_max - m.j_min + 1;
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
  const double er = std::exp(-m.r);
  for (int j = m.j_min; j < m.j_max; ++j) A(j + 1 - m.j_min, j - m.j_min) = er;
  A(-m.j_min, -m.j_min) = m.w0;
  A(2 - m.j_min, -m.j_min) += -std::exp(-2.0 * m.r) / m.w1;
  return A;
}

namespace {
double spectral_norm(const Eigen::MatrixXcd& A) {
  Eigen::VectorXcd x = Eigen::VectorXcd::Ones(A.cols()) / std::sqrt(static_cast<double>(A.cols()));
  double est = 0.0;
  for (int it = 0; it < 60; ++it) {
    Eigen::VectorXcd y = A.adjoint() * (A * x);
    const double nrm = y.norm();
    if (nrm == 0.0) return 0.0;
    est = std::sqrt(nrm);
    x = y / nrm;
  }
  return est;
}
}  // namespace

FiniteSectionReport finite_section_report(const ShiftModel& m, int N,
                                          const std::vector<double>& radius_offsets) {
  if (N < 10) throw ConfigError("finite section size must be at least 10");
  const int jmin = -N / 2;
  ShiftModel sec(m.w0, m.w1, m.r, jmin, jmin + N - 1);
  Eigen::MatrixXcd A = conjugated_LW(sec);
  FiniteSectionReport rep;
  rep.N = N;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A, false);
  const double ess = std::exp(-m.r);
  rep.w0_distance = std::numeric_limits<double>::infinity();
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const cplx ev = es.eigenvalues()(i);
    rep.eigenvalues.push_back(ev);
    rep.w0_distance = std::min(rep.w0_distance, std::abs(ev - m.w0));
    if (std::abs(ev) > ess + 1e-9) ++rep.outside_essential;
  }
  std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(), [](cplx a, cplx b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
    return std::arg(a) < std::arg(b);
  });
  rep.isolated_w0_found = rep.w0_distance <= 1e-6;
  rep.w0_outside_margin = std::abs(m.w0) > ess + 0.1;

  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(N, N);
  for (double off : radius_offsets) {
    const double rad = ess + off;
    double worst = 0.0;
    for (int k = 0; k < 8; ++k) {
      const cplx z = std::polar(rad, 2.0 * kPi * (k + 0.5) / 8.0);
      // z - A is lower triangular, so the inverse is a triangular solve.
      Eigen::MatrixXcd R = (z * I - A).triangularView<Eigen::Lower>().solve(I);
      worst = std::max(worst, spectral_norm(R));
    }
    rep.radii.push_back(rad);
    rep.resolvent_norms.push_back(worst);
  }
  return rep;
}

}  // namespace ruelle
