#include <cmath>
#include <memory>

#include "doctest.h"
#include "ruelle/common.hpp"
#include "ruelle/quantize.hpp"

using namespace ruelle;

namespace {

// Setup costs a few seconds; every case shares one band-6 quantizer on N = 32.
struct Fixture {
  MetricParams p{0.5, 0.5, 0.0};
  std::shared_ptr<PacketNormalizer> nm = std::make_shared<PacketNormalizer>(p, 2);
  TorusGrid g{2, 32};
  std::shared_ptr<TorusBargmann> b = std::make_shared<TorusBargmann>(nm, PhaseGridSpec{g, 1.0, 0.0});
  Quantizer q{b, 6};
  WeightedSpace flat = WeightedSpace::build(q, [](const PhasePoint&) { return 1.0; });
  WeightedSpace sobolev = WeightedSpace::build(q, [](const PhasePoint& r) { return std::sqrt(jbracket(r.omega)); });
};

const Fixture& fx() {
  static const Fixture f;
  return f;
}

Symbol bump(const MetricParams& p, double c0, double w) {
  return Symbol{[=](const PhasePoint& r) {
                  const double e = (r.xi(0) * r.xi(0) + (r.omega - c0) * (r.omega - c0)) / (2.0 * w * w);
                  return cplx(std::exp(-e) * std::cos(r.z));
                },
                [=](const PhasePoint& r) { return (1.0 / w) / delta_perp(r.eta_norm(), p) + delta_par(r.eta_norm(), p); },
                1.0};
}

}  // namespace

TEST_SUITE("quantize") {
  TEST_CASE("band must clear the grid edge") {
    const auto& f = fx();
    CHECK_THROWS_AS(Quantizer(f.b, 15), ConfigError);
    CHECK_THROWS_AS(Quantizer(f.b, -1), ConfigError);
    CHECK(f.q.dim() == 13 * 13);
  }

  TEST_CASE("Op(1) is the identity up to the resolution floor") {
    const auto& f = fx();
    const Eigen::MatrixXcd one = f.q.matrix(constant_symbol(1.0));
    const auto I = Eigen::MatrixXcd::Identity(f.q.dim(), f.q.dim());
    CHECK(power_norm(one - I) <= 2e-3);
    // Linear in the symbol.
    const cplx c(2.0, -1.0);
    CHECK((f.q.matrix(constant_symbol(c)) - c * one).norm() <= 1e-12 * one.norm());
  }

  TEST_CASE("anti-Wick quantization is self-adjoint and positive for real symbols") {
    const auto& f = fx();
    const Symbol a = bump(f.p, 1.0, 2.0);
    const Symbol ac{[&](const PhasePoint& r) { return std::conj(a.a(r)); }, {}, 0.0};
    const Eigen::MatrixXcd m = f.q.matrix(a);
    CHECK((m.adjoint() - f.q.matrix(ac)).norm() <= 1e-12 * m.norm());
    const Symbol sq{[&](const PhasePoint& r) { return cplx(std::norm(a.a(r))); }, {}, 0.0};
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(f.q.matrix(sq));
    CHECK(es.eigenvalues().minCoeff() >= -1e-12);
  }

  TEST_CASE("operator norm is bounded by the sup of the symbol") {
    const auto& f = fx();
    const Symbol a = bump(f.p, 0.0, 3.0);
    const double s = f.q.sup([&](const PhasePoint& r) { return std::abs(a.a(r)); });
    CHECK(s <= 1.0);
    CHECK(power_norm(f.q.matrix(a)) <= s * (1.0 + 2e-3));
  }

  TEST_CASE("trace matches the phase-space integral") {
    const auto& f = fx();
    const Symbol at{[](const PhasePoint& r) { return cplx(std::exp(-(r.xi(0) * r.xi(0) + r.omega * r.omega) / 4.0)); },
                    {}, 0.0};
    const cplx tr = f.q.matrix(at).trace(), formula = f.q.trace_formula(at);
    CHECK(std::abs(tr - formula) / std::abs(formula) <= 1e-2);
  }

  TEST_CASE("sobolev norm with unit weight is the L2 norm") {
    const auto& f = fx();
    Rng rng(4);
    Eigen::VectorXcd uh = Eigen::VectorXcd::Zero(f.g.size());
    for (long i = 0; i < f.g.size(); ++i)
      if (f.g.mode(i).cwiseAbs().maxCoeff() <= 4) uh(i) = cplx(rng.normal(), rng.normal());
    const Eigen::VectorXcd u = from_modes(f.g, uh);
    const auto one = [](const PhasePoint&) { return 1.0; };
    CHECK(sobolev_norm(*f.b, u, one) == doctest::Approx(grid_norm(f.g, u)).epsilon(1e-3));
    CHECK(sobolev_norm(*f.b, u, one, true) == doctest::Approx(grid_norm(f.g, u)).epsilon(1e-3));
    CHECK(f.flat.norm(f.q.to_basis(to_modes(f.g, u))) == doctest::Approx(grid_norm(f.g, u)).epsilon(2e-3));
  }

  TEST_CASE("weighted adjoint") {
    const auto& f = fx();
    CHECK(hw_adjoint_defect(f.sobolev, f.q.matrix(bump(f.p, 0.0, 2.0)), 4, 11) <= 1e-12);
  }

  TEST_CASE("composition and Egorov residuals stay under their bounds") {
    const auto& f = fx();
    const auto c = composition_residual(f.q, f.sobolev, bump(f.p, 0.0, 3.0), constant_symbol(2.0), 1.0);
    CHECK(c.pass);
    const auto d = composition_residual(f.q, f.sobolev, bump(f.p, 1.0, 2.0), bump(f.p, -1.0, 2.5), 1.0);
    CHECK(d.pass);
    const Symbol uncertified{[](const PhasePoint&) { return cplx(1.0); }, {}, 0.0};
    CHECK_THROWS_AS(composition_residual(f.q, f.sobolev, bump(f.p, 0.0, 2.0), uncertified, 1.0), ConfigError);
    const TranslationFlow flow{Eigen::Vector2d(0.0, 1.0)};
    const auto e0 = egorov_residual(f.q, f.sobolev, bump(f.p, 0.0, 2.0), 0.0, flow, 1.0);
    CHECK(e0.residual <= 1e-12);
    const auto e1 = egorov_residual(f.q, f.sobolev, bump(f.p, 0.0, 2.0), 1.0, flow, 1.0);
    CHECK(e1.pass);
  }

  TEST_CASE("translation transfer is diagonal and unitary on the band") {
    const auto& f = fx();
    const TranslationFlow flow{Eigen::Vector2d(0.3, 1.0)};
    const Eigen::VectorXcd d = f.q.transfer_diagonal(flow, 0.7);
    CHECK(d.size() == f.q.dim());
    CHECK((d.cwiseAbs().array() - 1.0).abs().maxCoeff() <= 1e-14);
    CHECK_THROWS_AS(TranslationFlow{Eigen::Vector3d(1.0, 0.0, 0.0)}.lift(PhasePoint::origin(1), 1.0), ConfigError);
  }

  TEST_CASE("transfer operator is microlocal along the lifted flow") {
    const auto& f = fx();
    const TranslationFlow flow{Eigen::Vector2d(0.0, 1.0)};
    const PhasePoint rho(Eigen::VectorXd::Zero(1), 0.0, Eigen::VectorXd::Zero(1), 4.0);
    std::vector<double> dist;
    for (int d = 1; d <= 10; ++d) dist.push_back(d);
    const auto fit = microlocality_probe(*f.nm, rho, 1.0, flow, microlocality_probe_grid(flow.lift(rho, 1.0), f.p, dist));
    CHECK(fit.ratio_beyond(6.0) >= 1e3);
    CHECK(fit.decay_exponent >= 4.0);
    CHECK_THROWS_AS(microlocality_probe(*f.nm, rho, 1.0, flow, {rho}), ConfigError);
  }
}
