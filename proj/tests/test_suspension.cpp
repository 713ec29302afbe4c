#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "ruelle/suspension.hpp"

using namespace ruelle;

TEST_SUITE("suspension") {
  TEST_CASE("mapping torus validation") {
    const MappingTorus mt = MappingTorus::cat();
    CHECK_NOTHROW(mt.validate());
    CHECK(mt.lambda() == doctest::Approx(std::log((3.0 + std::sqrt(5.0)) / 2.0)).epsilon(1e-14));
    MappingTorus bad = mt;
    bad.f << 1, 1, 0, 1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = mt;
    bad.roof = 2.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    const Nu nu{3, -5};
    CHECK(mt.backward(mt.forward(nu)) == nu);
    CHECK(mt.forward(mt.backward(nu)) == nu);
  }

  TEST_CASE("flow returns to the fundamental domain") {
    const MappingTorus mt = MappingTorus::cat();
    const Eigen::Vector3d p(0.2, 0.7, 0.4);
    const Eigen::Vector3d q = mt.flow(p, 0.3);
    CHECK((q - Eigen::Vector3d(0.2, 0.7, 0.7)).norm() <= 1e-14);
    const Eigen::Vector3d r = mt.flow(p, 1.0);
    CHECK(r(2) == doctest::Approx(0.4));
    CHECK((r - p).norm() > 1e-3);
    CHECK((mt.flow(r, -1.0) - p).norm() <= 1e-12);
    CHECK((mt.flow(mt.flow(p, 0.8), 1.7) - mt.flow(p, 2.5)).norm() <= 1e-12);
  }

  TEST_CASE("zero sector eigenvalues") {
    const auto s0 = zero_sector_spectrum(0);
    REQUIRE(s0.points.size() == 1);
    CHECK(s0.points[0].z == cplx(0.0));
    const auto s3 = zero_sector_spectrum(3);
    REQUIRE(s3.points.size() == 7);
    for (int k = -3; k <= 3; ++k) CHECK(std::abs(s3.points[k + 3].z - cplx(0.0, 2.0 * kPi * k)) <= 1e-15);
    const MappingTorus mt = MappingTorus::cat();
    for (int k : {-2, 0, 1, 5}) {
      CHECK(zero_sector_eigen_residual(mt, k, 0.37, 200, 3) <= 1e-12);
      CHECK(zero_sector_generator_residual(k) <= 1e-10);
    }
  }

  TEST_CASE("fourier orbits") {
    const MappingTorus mt = MappingTorus::cat();
    const MetricParams p(1.0, 0.5, 0.0);
    const Nu rep = orbit_representative(mt, Nu{5, 3});
    CHECK(orbit_representative(mt, mt.forward(Nu{5, 3})) == rep);
    CHECK(orbit_representative(mt, mt.backward(Nu{5, 3})) == rep);
    const auto o = build_orbit(mt, Nu{1, 0}, p);
    CHECK(o.points[o.j_back] == o.representative);
    for (std::size_t i = 0; i + 1 < o.points.size(); ++i) {
      CHECK(mt.forward(o.points[i]) == o.points[i + 1]);
      for (std::size_t j = i + 1; j < o.points.size(); ++j) CHECK(o.points[i] != o.points[j]);
    }
    // Representatives are distinct orbits.
    const auto reps = orbit_representatives(mt, 6.0);
    CHECK(!reps.empty());
    for (std::size_t i = 0; i < reps.size(); ++i) {
      CHECK(orbit_representative(mt, reps[i]) == reps[i]);
      for (std::size_t j = i + 1; j < reps.size(); ++j) CHECK(reps[i] != reps[j]);
    }
  }

  TEST_CASE("sector operator entries") {
    const MappingTorus mt = MappingTorus::cat();
    const MetricParams p(1.0, 0.5, 0.0);
    const auto o = build_orbit(mt, Nu{1, 0}, p);
    EscapeConfig flat;
    flat.r_u = flat.r_s = 0.0;
    for (double e : orbit_sector_operator(o, flat, p).entries) CHECK(e == doctest::Approx(1.0).epsilon(1e-14));
    EscapeConfig c;  // R_u = R_s = 2
    const auto op = orbit_sector_operator(o, c, p);
    // Far along the unstable end W shrinks by e^{-lambda (1 - alpha) R_u} per step.
    CHECK(op.entries.back() == doctest::Approx(std::exp(-mt.lambda() * 0.5 * c.r_u)).epsilon(0.02));
    CHECK(op.norm_bound() == *std::max_element(op.entries.begin(), op.entries.end()));
    CHECK(op.norm_bound() < 0.4);
    const Eigen::MatrixXd m = op.matrix();
    CHECK(m.rows() == static_cast<long>(op.entries.size()) + 1);
    CHECK(m.norm() > 0.0);
    CHECK_THROWS_AS(orbit_sector_operator(o, c, p, 1e6), ResolutionError);
  }

  TEST_CASE("full spectrum and certification") {
    const MappingTorus mt = MappingTorus::cat();
    const MetricParams p(1.0, 0.5, 0.0);
    EscapeConfig c;
    c.r_u = c.r_s = 8.0;
    const auto none = full_spectrum(mt, 2, 0.0, c, p, std::exp(-3.0));
    CHECK(none.points.size() == 5);
    CHECK(none.certificates.empty());
    const auto spec = full_spectrum(mt, 5, 10.0, c, p, std::exp(-3.0));
    CHECK(spec.points.size() == 11);
    CHECK(spec.all_pass());
    CHECK_NOTHROW(require_certified(spec));
    const auto strict = full_spectrum(mt, 5, 10.0, c, p, 1e-300);
    CHECK(!strict.all_pass());
    CHECK_THROWS_AS(require_certified(strict), CertificateError);
  }

  TEST_CASE("weyl count of the zero sector") {
    const auto s = zero_sector_spectrum(5);
    for (int k = 0; k <= 5; ++k) CHECK(weyl_count(s, -1.0, 2.0 * kPi * k - 0.5) == 1);
    CHECK(weyl_count(s, -1.0, 2.0 * kPi * 6) == 0);
    CHECK(weyl_count(s, 0.0, 0.0 - 0.5) == 0);  // Re z = 0 is not > 0
    CHECK(weyl_count(SpectrumResult{}, -1.0, 0.0) == 0);
  }

  TEST_CASE("time-one transfer preserves fourier orbits") {
    const MappingTorus mt = MappingTorus::cat();
    FourierSeries u{{Nu{1, 0}, cplx(1.0, 0.5)}, {Nu{1, 1}, cplx(-2.0)}, {Nu{0, 3}, cplx(0.0, 1.0)}};
    const FourierSeries v = transfer_time_one(mt, u);
    CHECK(v.size() == u.size());
    for (const auto& [nu, c] : u) {
      const auto pu = project_orbit(mt, u, nu), pv = project_orbit(mt, v, nu);
      CHECK(pu.size() == pv.size());
      // No leakage: L maps the orbit slice into itself.
      const FourierSeries lp = transfer_time_one(mt, pu);
      for (const auto& [m, w] : lp) CHECK(std::abs(pv.at(m) - w) <= 1e-15);
    }
  }

  TEST_CASE("parabolic vicinity membership") {
    // eps = 0.1: with eps >= alpha_perp the stable condition is vacuous.
    const DualSplitting s = MappingTorus::cat().dual_split();
    const MetricParams p(1.0, 0.5, 0.0);
    PhasePoint r = PhasePoint::origin(2);
    r.xi = Eigen::VectorXd(s.recompose(1e6, 0.0));
    r.omega = 10.0;
    CHECK(in_parabolic_vicinity(r, 10.0, 0.1, s, p));
    r.omega = 10.0 + 1e4;
    CHECK(!in_parabolic_vicinity(r, 10.0, 0.1, s, p));
    r.omega = 10.0;
    r.xi = Eigen::VectorXd(s.recompose(1e6, 1e6));
    CHECK(!in_parabolic_vicinity(r, 10.0, 0.1, s, p));
  }

  TEST_CASE("wavefront of an eigenfunction concentrates at omega = 2 pi k") {
    const DualSplitting s = MappingTorus::cat().dual_split();
    const MetricParams p(0.05, 0.5, 0.0);
    const EscapeConfig c;
    const int k = 2;
    const double om0 = 2.0 * kPi * k;
    std::vector<PhasePoint> probe;
    for (double d : {0.0, 1.0, 2.0, 4.0}) {
      PhasePoint r = PhasePoint::origin(2);
      r.omega = om0 + d / delta_par(om0, p);
      probe.push_back(r);
    }
    const auto rec = wavefront_profile(k, probe, p, c, s);
    REQUIRE(rec.size() == probe.size());
    for (std::size_t i = 1; i < rec.size(); ++i) CHECK(rec[i].value < rec[i - 1].value);
    CHECK(rec[0].weight == 1.0);
    CHECK(rec[0].in_vicinity);
    CHECK(wavefront_constant(rec, om0, 2.0) >= rec[0].value);
    CHECK_THROWS_AS(wavefront_profile(k, probe, MetricParams(1.0, 0.5, 0.0), c, s), ResolutionError);
  }
}
