#include <cmath>

#include "doctest.h"
#include "ruelle/shift_model.hpp"

using namespace ruelle;

namespace {

// Independent oracle: dense matrix of L on the window, built entry by entry.
Eigen::MatrixXcd dense_L(const ShiftModel& m) {
  const int n = m.j_max - m.j_min + 1;
  Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(n, n);
  auto at = [&](int row, int col) -> cplx& { return L(row - m.j_min, col - m.j_min); };
  for (int j = m.j_min; j < m.j_max; ++j) at(j + 1, j) = 1.0;
  at(0, 0) += m.w0;
  at(2, 0) += -1.0 / m.w1;
  return L;
}

}  // namespace

TEST_SUITE("shift_model") {
  TEST_CASE("model validation") {
    CHECK_THROWS_AS(ShiftModel(0.0, 0.5, 1.0), ConfigError);
    CHECK_THROWS_AS(ShiftModel(0.5, 0.0, 1.0), ConfigError);
    CHECK_THROWS_AS(ShiftModel(0.5, 0.5, 1.0, -1, 50), ConfigError);
    CHECK_NOTHROW(ShiftModel(0.5, 0.5, 1.0, -2, 2));
  }

  TEST_CASE("apply L on unit vectors") {
    const ShiftModel m(0.5, 0.25, 1.0, -10, 10);
    const auto a = apply_L(m, Sequence::delta(-10, 10, 5));
    for (int j = -9; j <= 10; ++j) CHECK(a.value[j] == cplx(j == 6 ? 1.0 : 0.0));
    const auto b = apply_L(m, Sequence::delta(-10, 10, 0));
    CHECK(b.value[0] == cplx(0.5));
    CHECK(b.value[1] == cplx(1.0));
    CHECK(b.value[2] == cplx(-4.0));
    CHECK(!b.is_valid(-10));
  }

  TEST_CASE("apply L matches the dense oracle") {
    const ShiftModel m(cplx(0.3, 0.4), cplx(-0.2, 0.7), 0.5, -12, 12);
    Sequence u(-12, 12);
    for (int j = -12; j <= 12; ++j) u[j] = cplx(std::sin(j), std::cos(3.0 * j));
    Eigen::VectorXcd uv(25);
    for (int j = -12; j <= 12; ++j) uv(j + 12) = u[j];
    const Eigen::VectorXcd ref = dense_L(m) * uv;
    const auto img = apply_L(m, u);
    for (int j = -11; j <= 12; ++j) CHECK(std::abs(img.value[j] - ref(j + 12)) <= 1e-15);
  }

  TEST_CASE("inverse on interior rows") {
    for (double r : {-1.0, 0.0, 2.0}) CHECK(inverse_residual(ShiftModel(cplx(0.7, 0.1), 0.3, r)) <= 1e-14);
  }

  TEST_CASE("eigenvector hand values") {
    const ShiftModel m(0.5, 0.25, 1.0);
    const Sequence U = eigvec_U(m, 1.0);
    CHECK(U[-1] == cplx(0.0));
    CHECK(U[-7] == cplx(0.0));
    CHECK(U[0] == cplx(1.0));
    CHECK(std::abs(U[1] - 2.0) < 1e-15);
    CHECK(std::abs(U[2] + 4.0) < 1e-15);
    CHECK(std::abs(U[3] + 8.0) < 1e-15);
    CHECK(eigen_residual(m, U, m.w0) <= 1e-12);
    const Sequence V = eigvec_V(m, 1.0);
    CHECK(V[2] == cplx(0.0));
    CHECK(std::abs(V[0] - 0.25) < 1e-15);
    CHECK(eigen_residual(m, V, m.w1) <= 1e-12);
  }

  TEST_CASE("equal eigenvalues give finite support") {
    const ShiftModel m(0.4, 0.4, 0.0);
    const Sequence U = eigvec_U(m, 1.0);
    for (int j = 2; j <= 50; ++j) CHECK(U[j] == cplx(0.0));
    CHECK(hw_membership(tails_U(m), -5.0) == Membership::member);
  }

  TEST_CASE("eigen residuals for random draws") {
    Rng rng(17);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const cplx w0 = std::polar(rng.uniform(0.05, 1.5), rng.uniform(0.0, 2.0 * kPi));
      const cplx w1 = std::polar(rng.uniform(0.05, 1.5), rng.uniform(0.0, 2.0 * kPi));
      const ShiftModel m(w0, w1, rng.uniform(-2.0, 2.0));
      worst = std::max({worst, eigen_residual(m, eigvec_U(m, 1.0), w0), eigen_residual(m, eigvec_V(m, 1.0), w1)});
    }
    CHECK(worst <= 1e-12);
  }

  TEST_CASE("membership examples") {
    CHECK(hw_membership(tails_U(ShiftModel(0.5, 0.2, 1.0)), 1.0) == Membership::member);
    CHECK(hw_membership(tails_U(ShiftModel(0.5, 0.2, -1.0)), -1.0) == Membership::not_member);
    CHECK(hw_membership(tails_V(ShiftModel(0.9, 0.5, 1.0)), 1.0) == Membership::not_member);
    CHECK(hw_membership(tails_V(ShiftModel(0.9, 0.5, -1.0)), -1.0) == Membership::member);
    const double r = std::log(2.0);
    CHECK(hw_membership(tails_U(ShiftModel(0.5, 0.2, r)), r) == Membership::boundary);
  }

  TEST_CASE("membership sweep follows the strict inequalities") {
    for (int ri = -4; ri <= 4; ++ri) {
      const double r = 0.5 * ri;
      for (int i = 1; i <= 19; ++i) {
        const double a = 0.1 * i;
        if (std::abs(a - std::exp(-r)) < 1e-9) continue;
        const ShiftModel m(std::polar(a, 0.3), std::polar(a, 2.0), r);
        CHECK(hw_membership(tails_U(m), r) == (a > std::exp(-r) ? Membership::member : Membership::not_member));
        CHECK(hw_membership(tails_V(m), r) == (a < std::exp(-r) ? Membership::member : Membership::not_member));
      }
    }
  }

  TEST_CASE("conjugated operator") {
    const ShiftModel m0(0.5, 0.25, 0.0, -5, 5);
    CHECK((conjugated_LW(m0) - dense_L(m0)).norm() <= 1e-15);
    const ShiftModel m(0.5, 0.25, 1.0, -5, 5);
    const auto LW = conjugated_LW(m);
    for (int j = 0; j + 1 < 11; ++j) CHECK(std::abs(LW(j + 1, j) - std::exp(-1.0)) < 1e-15);
    CHECK(std::abs(LW(5, 5) - 0.5) < 1e-15);
    CHECK(std::abs(LW(7, 5) + std::exp(-2.0) / 0.25) < 1e-14);
    // Diag(W) U is an eigenvector of the conjugated matrix on interior rows.
    const Sequence U = eigvec_U(m, 1.0);
    Eigen::VectorXcd wu(11);
    for (int j = -5; j <= 5; ++j) wu(j + 5) = std::exp(-1.0 * j) * U[j];
    const Eigen::VectorXcd res = LW * wu - m.w0 * wu;
    for (int i = 1; i < 11; ++i) CHECK(std::abs(res(i)) <= 1e-12 * (1.0 + std::abs(wu(i))));
  }

  TEST_CASE("finite sections are diagnostics") {
    const auto big = finite_section_report(ShiftModel(0.9, 0.1, 1.0, -300, 300), 400);
    CHECK(big.isolated_w0_found);
    CHECK(big.w0_distance <= 1e-8);
    const auto small = finite_section_report(ShiftModel(0.1, 0.05, 1.0, -300, 300), 200);
    CHECK(small.outside_essential == 0);
    // w0 is an eigenvalue of every finite section, so only the margin flag
    // separates a genuine resonance from one buried in the essential disc.
    CHECK(small.isolated_w0_found);
    CHECK(!small.w0_outside_margin);
    CHECK(big.w0_outside_margin);
    // Resolvent grows with N just inside the essential circle, not outside it.
    const auto n1 = finite_section_report(ShiftModel(0.9, 0.1, 1.0, -300, 300), 40);
    const auto n2 = finite_section_report(ShiftModel(0.9, 0.1, 1.0, -300, 300), 120);
    CHECK(n2.resolvent_norms[0] > 10.0 * n1.resolvent_norms[0]);
    CHECK(n2.resolvent_norms[2] < 2.0 * n1.resolvent_norms[2]);
  }
}
