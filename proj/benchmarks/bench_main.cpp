#include <benchmark/benchmark.h>

#include "rmstx/ao.hpp"
#include "rmstx/baselines.hpp"
#include "rmstx/experiments.hpp"

namespace {

rmstx::Scenario scenario_for(int side, int users) {
  rmstx::ScenarioConfig config;
  config.m_x = config.m_z = side;
  config.k_users = users;
  return rmstx::build_scenario(config, 1);
}

void BM_GenerateScenario(benchmark::State& state) {
  rmstx::ScenarioConfig config;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(rmstx::build_scenario(config, seed++));
}
BENCHMARK(BM_GenerateScenario);

void BM_BeamSubproblem(benchmark::State& state) {
  const auto s = scenario_for(static_cast<int>(state.range(0)), 4);
  const auto start = rmstx::initialize(s.channels, s.budget);
  const auto problem = rmstx::build_beam_subproblem(start.point, s.channels, s.budget, 1.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(rmstx::solve_psd_subproblem(problem, start.point.f_matrix));
  state.SetLabel("M=" + std::to_string(state.range(0) * state.range(0)));
}
BENCHMARK(BM_BeamSubproblem)->Arg(4)->Arg(5)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_PowerSubproblem(benchmark::State& state) {
  const auto s = scenario_for(5, static_cast<int>(state.range(0)));
  const auto start = rmstx::initialize(s.channels, s.budget);
  const auto problem = rmstx::build_power_subproblem(start.point, s.channels, s.budget);
  for (auto _ : state)
    benchmark::DoNotOptimize(rmstx::solve_simplex_subproblem(problem, start.point.powers));
}
BENCHMARK(BM_PowerSubproblem)->DenseRange(2, 6, 2)->Unit(benchmark::kMicrosecond);

void BM_Optimize(benchmark::State& state) {
  const auto s = scenario_for(static_cast<int>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(rmstx::optimize(s.channels, s.budget));
}
BENCHMARK(BM_Optimize)->Arg(4)->Arg(5)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_ZeroForcing(benchmark::State& state) {
  const auto s = scenario_for(5, 4);
  for (auto _ : state) benchmark::DoNotOptimize(rmstx::zf_beamforming(s.channels, s.budget));
}
BENCHMARK(BM_ZeroForcing);

}  // namespace

BENCHMARK_MAIN();
