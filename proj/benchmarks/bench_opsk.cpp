#include <benchmark/benchmark.h>

#include <vector>

#include "opsk/simulation.hpp"

using namespace opsk;

namespace {

const DiffusionModel kAir = DiffusionModel::isotropic(kDefaultDiffusion);

void BM_AbsorbedMass(benchmark::State& state) {
  const ReceiverGeometry geom{{0.1, 0.0, 0.0}, 0.005};
  std::vector<ReleaseEvent> live;
  for (std::int64_t k = 0; k < state.range(0); ++k) {
    live.push_back({OdorId{static_cast<std::uint32_t>(k % 8)}, 2.4e-9, k + 1,
                    {0.1 - 0.002 * k, 0.0, 0.0}, 1.0 + 2.0 * k});
  }
  for (auto _ : state) benchmark::DoNotOptimize(absorbed_mass(live, geom, kAir));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AbsorbedMass)->Arg(1)->Arg(8)->Arg(64);

void BM_OptimizeAbsorptionTime(benchmark::State& state) {
  const ReceiverGeometry geom{{1.0, 0.0, 0.0}, 0.01};
  const Vec3 flow{0.1, 0.0, 0.0};
  const AbsorptionSearch search = default_search(geom, flow, kAir);
  for (auto _ : state) {
    benchmark::DoNotOptimize(optimize_absorption_time(geom, flow, kAir, search));
  }
}
BENCHMARK(BM_OptimizeAbsorptionTime);

void BM_RunScenario(benchmark::State& state) {
  ScenarioConfig cfg;
  cfg.allocation = BitAllocation(2, 1, 1);
  cfg.fnr.fill(FlowNoiseRatio::ratio(20.0));
  cfg.pn = 5.0;
  cfg.n_symbols = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(run_scenario(cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunScenario)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_SerType2Analytic(benchmark::State& state) {
  const OdorBank bank = generate_odor_bank(BitAllocation(3, 3, 2), 0.8, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(ser_type2_analytic(bank, 5.0));
}
BENCHMARK(BM_SerType2Analytic);

}  // namespace

BENCHMARK_MAIN();
