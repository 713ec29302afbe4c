#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "ruelle/common.hpp"
#include "ruelle/fractal_count.hpp"

using namespace ruelle;

namespace {

std::vector<double> geometric(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return v;
}

}  // namespace

TEST_SUITE("fractal_count") {
  TEST_CASE("single-term form is a cosine") {
    const HolderForm f = synth_holder(1.0, 3, 1, 1, false);
    for (double x : {0.0, 0.1, 0.37, 0.9}) CHECK(f.component(0, x) == doctest::Approx(std::cos(2.0 * kPi * x)).epsilon(1e-14));
    CHECK(f.sup_bound() == doctest::Approx(1.0));
  }

  TEST_CASE("sup bound holds") {
    const HolderForm f = synth_holder(0.5, 7, 2);
    Rng rng(1);
    for (int i = 0; i < 2000; ++i) {
      Eigen::VectorXd x(2);
      x << rng.uniform(), rng.uniform();
      CHECK(f(x).cwiseAbs().maxCoeff() <= f.sup_bound() * (1.0 + 1e-12));
    }
    CHECK_THROWS_AS(synth_holder(0.0, 1, 1), ConfigError);
    CHECK_THROWS_AS(synth_holder(1.5, 1, 1), ConfigError);
  }

  TEST_CASE("unit holder normalization") {
    const HolderForm f = synth_holder(0.5, 11, 1);
    double mean = 0.0;
    for (int level : {8, 10, 12}) mean += median_cell_holder(f, 0, level, 0.5) / 3.0;
    CHECK(mean == doctest::Approx(1.0).epsilon(1e-9));
  }

  TEST_CASE("holder exponent is sharp") {
    // Ratios at beta0 stay bounded; at beta0 + 0.1 they grow like s^{-0.1},
    // short of the full 10x because 40 base-2 terms stop resolving near 1e-12.
    const HolderForm f = synth_holder(0.5, 5, 1, 40);
    const std::vector<double> scales{1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12};
    const auto at = holder_ratios(f, 0.5, scales, 2000, 3);
    const auto above = holder_ratios(f, 0.6, scales, 2000, 3);
    CHECK(*std::max_element(at.begin(), at.end()) <= 4.0);
    CHECK(above.back() >= 5.0 * above.front());
  }

  TEST_CASE("box counts follow the smooth and rough regimes") {
    const auto omegas = geometric(64.0, 16384.0, 9);
    const HolderForm smooth = synth_holder(1.0, 2, 1);
    const auto s = optimal_alpha(smooth, omegas, {0.5});
    CHECK(s.exponents[0] == doctest::Approx(0.5).epsilon(0.1));
    const HolderForm rough = synth_holder(0.5, 1, 1);
    const auto r = optimal_alpha(rough, omegas, {0.6, 0.8});
    CHECK(std::abs(r.exponents[0] - 0.7) <= 0.05);
    CHECK(std::abs(r.exponents[1] - 0.8) <= 0.05);
  }

  TEST_CASE("optimal alpha sits near the kink") {
    const auto omegas = geometric(64.0, 16384.0, 9);
    std::vector<double> alphas;
    for (double a = 0.5; a < 0.98; a += 0.025) alphas.push_back(a);
    const HolderForm f = synth_holder(1.0, 1, 1);
    const auto scan = optimal_alpha(f, omegas, alphas);
    CHECK(std::abs(scan.alpha_star - 0.5) <= 0.05);
    CHECK(scan.exponent_star == doctest::Approx(0.5).epsilon(0.1));
    CHECK(regime_deviation(scan, 1.0, 1) <= 0.05);
    // E is non-decreasing past the argmin.
    std::size_t i0 = 0;
    while (scan.alphas[i0] < scan.alpha_star) ++i0;
    for (std::size_t i = i0 + 1; i < scan.exponents.size(); ++i) CHECK(scan.exponents[i] >= scan.exponents[i - 1] - 0.02);
  }

  TEST_CASE("box count errors") {
    const HolderForm f = synth_holder(0.5, 1, 1);
    CHECK_THROWS_AS(box_count(f, 2.0, 0.6), ConfigError);
    CHECK_THROWS_AS(box_count(f, 100.0, 0.4), ConfigError);
    CHECK_THROWS_AS(box_count(f, 100.0, 1.0), ConfigError);
    CHECK_THROWS_AS(box_count(f, 1e12, 0.9), ResolutionError);
    CHECK_THROWS_AS(optimal_alpha(f, {64.0, 128.0}, {0.6}), ConfigError);
    CHECK(box_count(f, 256.0, 0.5) >= 16);
  }

  TEST_CASE("straightening map") {
    const HolderForm f = synth_holder(0.5, 4, 1);
    Rng rng(6);
    for (int i = 0; i < 500; ++i) {
      PhasePoint r = PhasePoint::origin(1);
      r.x(0) = rng.uniform();
      r.z = rng.uniform();
      r.omega = std::pow(10.0, rng.uniform(-1.0, 6.0)) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
      r.xi(0) = r.omega * f(r.x)(0);
      // The graph xi = omega varpi(x) goes to xi = 0.
      const PhasePoint s = straighten_phi(f, r);
      CHECK(std::abs(s.xi(0)) <= 1e-12 * std::abs(r.omega));
      CHECK(s.omega == r.omega);
      r.xi(0) += rng.normal() * 100.0;
      const PhasePoint back = straighten_phi_inverse(f, straighten_phi(f, r));
      CHECK(std::abs(back.xi(0) - r.xi(0)) <= 1e-12 * (std::abs(r.xi(0)) + std::abs(r.omega)));
    }
    PhasePoint r = PhasePoint::origin(1);
    r.xi(0) = 3.0;
    CHECK(straighten_phi(f, r).xi(0) == 3.0);
  }

  TEST_CASE("straightening is lipschitz at unit scale") {
    const HolderForm f = synth_holder(0.5, 1, 1);
    const auto rep = lipschitz_unit_scale_test(f, MetricParams(1.0, 2.0 / 3.0, 0.0), 2000, 8, 2.0);
    CHECK(rep.samples == 2000);
    CHECK(rep.violations == 0);
    CHECK(rep.max_ratio <= 2.0);
  }
}
