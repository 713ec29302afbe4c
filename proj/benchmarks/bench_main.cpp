#include <benchmark/benchmark.h>

#include <memory>

#include "ruelle/escape.hpp"
#include "ruelle/fractal_count.hpp"
#include "ruelle/suspension.hpp"
#include "ruelle/wavepackets.hpp"

using namespace ruelle;

static void BM_BoxCount(benchmark::State& st) {
  const HolderForm f = synth_holder(0.5, 1, 1);
  const double omega = static_cast<double>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(box_count(f, omega, 0.7));
}
BENCHMARK(BM_BoxCount)->RangeMultiplier(8)->Range(64, 1 << 15);

static void BM_EscapeWeight(benchmark::State& st) {
  const DualSplitting split = MappingTorus::cat().dual_split();
  const MetricParams p(1.0, 0.5, 0.0);
  EscapeConfig cfg;
  cfg.variant = st.range(0) == 0 ? EscapeVariant::product : EscapeVariant::averaged;
  PhasePoint rho = PhasePoint::origin(2);
  rho.xi = Eigen::VectorXd(split.recompose(1e4, 3e3));
  rho.omega = 50.0;
  for (auto _ : st) benchmark::DoNotOptimize(weight(rho, split, cfg, p));
}
BENCHMARK(BM_EscapeWeight)->Arg(0)->Arg(1);

static void BM_ResolveIdentity(benchmark::State& st) {
  const MetricParams p(0.5, 0.5, 0.0);
  auto nm = std::make_shared<PacketNormalizer>(p, 2);
  const TorusGrid g(2, static_cast<int>(st.range(0)));
  const TorusBargmann b(nm, {g, 1.0, 0.0});
  Eigen::VectorXcd uh = Eigen::VectorXcd::Zero(g.size());
  Rng rng(1);
  for (long i = 0; i < g.size(); ++i)
    if (g.mode(i).cwiseAbs().maxCoeff() <= 4) uh(i) = cplx(rng.normal(), rng.normal());
  const Eigen::VectorXcd u = from_modes(g, uh);
  for (auto _ : st) benchmark::DoNotOptimize(b.resolve_identity(u));
}
BENCHMARK(BM_ResolveIdentity)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_FullSpectrum(benchmark::State& st) {
  const MappingTorus mt = MappingTorus::cat();
  const MetricParams p(1.0, 0.5, 0.0);
  EscapeConfig cfg;
  cfg.r_u = cfg.r_s = 8.0;
  const double nu_max = static_cast<double>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(full_spectrum(mt, 5, nu_max, cfg, p, 0.049787068367863944));
}
BENCHMARK(BM_FullSpectrum)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
