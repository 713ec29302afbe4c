#include <cmath>
#include <sstream>

#include "doctest.h"
#include "ruelle/common.hpp"
#include "ruelle/escape.hpp"

using namespace ruelle;

namespace {

DualSplitting cat_split() {
  Eigen::Matrix2d f;
  f << 2.0, 1.0, 1.0, 1.0;
  return DualSplitting::from_matrix(f);
}

PhasePoint covector(const DualSplitting& s, double xi_u, double xi_s, double omega = 0.0) {
  PhasePoint r = PhasePoint::origin(2);
  r.xi = Eigen::VectorXd(s.recompose(xi_u, xi_s));
  r.omega = omega;
  return r;
}

}  // namespace

TEST_SUITE("escape") {
  TEST_CASE("dual splitting of the cat map") {
    const auto s = cat_split();
    CHECK(s.lambda == doctest::Approx(std::log((3.0 + std::sqrt(5.0)) / 2.0)).epsilon(1e-14));
    CHECK(std::abs(s.e_u_dual.dot(s.e_s_dual)) <= 1e-14);  // symmetric matrix
    Eigen::Matrix2d f;
    f << 2.0, 1.0, 1.0, 1.0;
    const double mu = std::exp(s.lambda);
    CHECK((f.transpose() * s.e_u_dual - mu * s.e_u_dual).norm() <= 1e-14);
    CHECK((f.transpose() * s.e_s_dual - s.e_s_dual / mu).norm() <= 1e-14);
    const Eigen::Vector2d xi(0.3, -1.7);
    const Eigen::Vector2d c = s.decompose(xi);
    CHECK((s.recompose(c(0), c(1)) - xi).norm() <= 1e-15);
    Eigen::Matrix2d bad;
    bad << 1.0, 1.0, 0.0, 1.0;
    CHECK_THROWS_AS(DualSplitting::from_matrix(bad), ConfigError);
    bad << 2.0, 0.0, 0.0, 1.0;
    CHECK_THROWS_AS(DualSplitting::from_matrix(bad), ConfigError);
  }

  TEST_CASE("config validation") {
    EscapeConfig c;
    CHECK_NOTHROW(c.validate());
    c.gamma = 1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.gamma = 0.3;
    c.gamma_prime = 0.4;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.gamma_prime = 0.0;
    c.r_u = -1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.r_u = 1.0;
    c.h0 = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.h0 = 1.0;
    c.variant = EscapeVariant::averaged;
    c.t_avg = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    CHECK(parse_escape_variant("W2") == EscapeVariant::averaged);
    CHECK(parse_escape_variant("W_lemma42") == EscapeVariant::product);
    CHECK_THROWS_AS(parse_escape_variant("W3"), ConfigError);
  }

  TEST_CASE("h_gamma_perp hand value") {
    // |xi| = 3 along e_u: delta_perp = 3^{-1/2}, <sqrt 3> = 2, so h = 2^{-1/2}.
    const auto s = cat_split();
    EscapeConfig c;
    c.gamma = 0.5;
    const MetricParams p(1.0, 0.5, 0.0);
    CHECK(h_gamma_perp(covector(s, 3.0, 0.0), s, c, p) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
    CHECK(h_gamma_perp(covector(s, 3.0, 0.0), s, c, p, 0.0) == 1.0);
  }

  TEST_CASE("weight is one on the trapped set") {
    const auto s = cat_split();
    const MetricParams p(1.0, 0.5, 0.0);
    for (auto v : {EscapeVariant::product, EscapeVariant::averaged}) {
      EscapeConfig c;
      c.variant = v;
      for (double om : {0.0, 1.0, -1e3, 1e9}) {
        const PhasePoint r = covector(s, 0.0, 0.0, om);
        CHECK(weight(r, s, c, p) == 1.0);
        CHECK(decay_ratio(r, 3.0, s, c, p) == 1.0);
      }
    }
  }

  TEST_CASE("lift acts diagonally in the splitting") {
    const auto s = cat_split();
    const PhasePoint r = lift(covector(s, 2.0, 3.0, 5.0), 1.5, s);
    const Eigen::Vector2d c = s.decompose(Eigen::Vector2d(r.xi(0), r.xi(1)));
    CHECK(c(0) == doctest::Approx(2.0 * std::exp(1.5 * s.lambda)).epsilon(1e-13));
    CHECK(c(1) == doctest::Approx(3.0 * std::exp(-1.5 * s.lambda)).epsilon(1e-13));
    CHECK(r.omega == 5.0);
  }

  TEST_CASE("fitted decay rates match the escape rate") {
    const auto s = cat_split();
    const MetricParams p(1.0, 0.5, 0.0);
    EscapeConfig c;  // R_u = R_s = 2, gamma = 0
    const double L = escape_rate(s, c, p);
    CHECK(L == doctest::Approx(s.lambda).epsilon(1e-14));
    CHECK(escape_rate_upper(s, c, p) == doctest::Approx(2.0 * s.lambda).epsilon(1e-14));
    CHECK(fitted_decay_rate(covector(s, 1e6, 0.0), 5.0, 21, s, c, p) == doctest::Approx(L).epsilon(0.05));
    CHECK(fitted_decay_rate(covector(s, 0.0, 1e6), 5.0, 21, s, c, p) == doctest::Approx(L).epsilon(0.05));
    // Mixed directions decay at least as fast.
    CHECK(fitted_decay_rate(covector(s, 1e4, 1e4, 10.0), 5.0, 21, s, c, p) >= 0.95 * L);
    CHECK_THROWS_AS(fitted_decay_rate(covector(s, 1.0, 0.0), 1.0, 2, s, c, p), ConfigError);
  }

  TEST_CASE("decay ratio obeys the upper bound") {
    const auto s = cat_split();
    const MetricParams p(1.0, 0.5, 0.0);
    EscapeConfig c;
    const double L = escape_rate(s, c, p);
    Rng rng(21);
    double worst = 0.0;
    for (int i = 0; i < 2000; ++i) {
      const double mag = std::pow(10.0, rng.uniform(1.0, 8.0)), th = rng.uniform(0.0, 2.0 * kPi);
      const PhasePoint r = covector(s, mag * std::cos(th), mag * std::sin(th), 0.1 * mag * rng.normal());
      const double t = rng.uniform(0.0, 10.0);
      worst = std::max(worst, decay_ratio(r, t, s, c, p) * std::exp(L * t));
    }
    // W(lift^t rho) / W(rho) <= C e^{-Lambda t} away from the trapped set
    // (|omega| small against |xi|). With |omega| ~ |xi| the plateau where both
    // components sit below 1/delta_perp pushes C past 2.5.
    CHECK(worst <= 1.5);
  }

  TEST_CASE("weight orders along the splitting") {
    const auto s = cat_split();
    const MetricParams p(1.0, 0.5, 0.0);
    EscapeConfig c;
    const Eigen::Vector3d eu(s.e_u_dual(0), s.e_u_dual(1), 0.0), es(s.e_s_dual(0), s.e_s_dual(1), 0.0);
    CHECK(order_estimate(eu, s, c, p) == doctest::Approx(-1.0).epsilon(0.05));
    CHECK(order_estimate(es, s, c, p) == doctest::Approx(1.0).epsilon(0.05));
    CHECK(std::abs(order_estimate(Eigen::Vector3d(0.0, 0.0, 1.0), s, c, p)) <= 1e-12);
    c.variant = EscapeVariant::averaged;
    c.r = 1.0;
    CHECK(order_estimate(eu, s, c, p) == doctest::Approx(-1.0).epsilon(0.05));
    CHECK(order_estimate(es, s, c, p) == doctest::Approx(1.0).epsilon(0.05));
  }

  TEST_CASE("projective step and its average") {
    CHECK(a0_profile(0.0) == -1.0);
    CHECK(a0_profile(0.25 * kPi - 0.1) == -1.0);
    CHECK(a0_profile(0.25 * kPi + 0.1) == 1.0);
    CHECK(std::abs(a0_profile(0.25 * kPi)) <= 1e-15);
    const double lam = cat_split().lambda;
    CHECK(projective_average(Eigen::Vector2d::Zero(), lam, 2.0) == 0.0);
    CHECK(std::abs(projective_average(Eigen::Vector2d(1.0, 1.0), lam, 2.0)) <= 1e-12);
    // Deep in the unstable cone every time slice sits at -1.
    CHECK(projective_average(Eigen::Vector2d(1.0, 0.8 * std::exp(-4.0 * lam)), lam, 2.0) == -1.0);
    CHECK(projective_average(Eigen::Vector2d(0.8 * std::exp(-4.0 * lam), 1.0), lam, 2.0) == 1.0);
    Rng rng(2);
    for (int i = 0; i < 1000; ++i) {
      const double a = projective_average(Eigen::Vector2d(rng.normal(), rng.normal()), lam, 2.0);
      CHECK(std::abs(a) <= 1.0);
    }
  }

  TEST_CASE("escape weight is temperate with N0 = R_s + R_u") {
    const auto s = cat_split();
    const MetricParams p(1.0, 0.5, 0.0);
    EscapeConfig c;
    CHECK(escape_temperate_constant(s, c, p, c.r_s + c.r_u, 1e8, 5000, 9) <= 2.0);
  }

  TEST_CASE("weight csv layout") {
    const auto s = cat_split();
    std::ostringstream os;
    write_weight_csv(os, s, EscapeConfig{}, MetricParams(1.0, 0.5, 0.0), {0.0, 1.0}, {0.0}, {0.0, 5.0});
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "xi_u,xi_s,omega,W");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 4);
  }
}
