#include <benchmark/benchmark.h>

#include "mlsim/simulation.hpp"

using namespace mlsim;

namespace {

ScenarioConfig desk(Strategy s, double mp) {
  ScenarioConfig cfg = desk_scale(default_scenario());
  cfg.strategy = s;
  cfg.market_penetration = mp;
  cfg.finalize();
  return cfg;
}

void BM_eidm_accel(benchmark::State& state) {
  IdmParams p = cacc_params(1.2);
  double v = 27.0, gap = 31.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(eidm_accel(v, 25.0, -0.5, gap, p));
  }
}
BENCHMARK(BM_eidm_accel);

void BM_cacc_following_accel(benchmark::State& state) {
  IdmParams p = cacc_params(1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cacc_following_accel(27.0, 25.0, -0.5, 40.0, p, 3.0));
  }
}
BENCHMARK(BM_cacc_following_accel);

void BM_neighbors(benchmark::State& state) {
  ScenarioConfig cfg = desk(Strategy::DL, 0.4);
  Simulation sim(cfg, 5);
  for (int k = 0; k < 6000; ++k) sim.step();  // populate the network
  std::vector<VehicleId> ids;
  for (const auto& v : sim.world().vehicles()) ids.push_back(v.id);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sim.world().neighbors(ids[i]));
    i = (i + 1) % ids.size();
  }
}
BENCHMARK(BM_neighbors);

void BM_step_desk_scale(benchmark::State& state) {
  Strategy strat = static_cast<Strategy>(state.range(0));
  ScenarioConfig cfg = desk(strat, 0.4);
  Simulation sim(cfg, 9);
  for (int k = 0; k < 6000; ++k) sim.step();  // steady state
  for (auto _ : state) {
    sim.step();
  }
  state.counters["vehicles"] =
      benchmark::Counter(static_cast<double>(sim.world().size()));
}
BENCHMARK(BM_step_desk_scale)
    ->Arg(static_cast<int>(Strategy::UML))
    ->Arg(static_cast<int>(Strategy::DL))
    ->Arg(static_cast<int>(Strategy::DLA));

void BM_full_desk_replication(benchmark::State& state) {
  for (auto _ : state) {
    ScenarioConfig cfg = desk(Strategy::DL, 0.4);
    Simulation sim(cfg, 7);
    sim.run();
    benchmark::DoNotOptimize(sim.summary());
  }
}
BENCHMARK(BM_full_desk_replication)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
