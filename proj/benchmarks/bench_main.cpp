#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>

#include "inls/classifier.hpp"
#include "inls/evolution.hpp"
#include "inls/ground_state.hpp"
#include "inls/radial_grid.hpp"

using namespace inls;

namespace {

const Params kRef = Params::validate(3, 0.5, 2.0, 0.0);

Field gaussian(const RadialGrid& g) {
  Field u(g.N);
  for (std::size_t j = 0; j < g.N; ++j) u[j] = std::exp(-0.5 * g.r[j] * g.r[j]) * std::polar(1.0, 0.1 * g.r[j] * g.r[j]);
  return u;
}

void BM_BuildGrid(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_grid(kRef, n, 20.0, {}));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BuildGrid)->RangeMultiplier(2)->Range(512, 8192)->Complexity();

void BM_ApplyPc(benchmark::State& state) {
  const RadialGrid g = build_grid(kRef, static_cast<std::size_t>(state.range(0)), 20.0, {});
  const Field u = gaussian(g);
  for (auto _ : state) benchmark::DoNotOptimize(apply_Pc(g, kRef, u));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ApplyPc)->RangeMultiplier(2)->Range(512, 8192)->Complexity();

void BM_Snapshot(benchmark::State& state) {
  const RadialGrid g = build_grid(kRef, static_cast<std::size_t>(state.range(0)), 20.0, {});
  const Field u = gaussian(g);
  for (auto _ : state) benchmark::DoNotOptimize(snapshot(g, kRef, u, 0.0));
}
BENCHMARK(BM_Snapshot)->Arg(2048);

void BM_GroundState(benchmark::State& state) {
  auto g = std::make_shared<const RadialGrid>(build_grid(kRef, static_cast<std::size_t>(state.range(0)), 20.0, {}));
  for (auto _ : state) benchmark::DoNotOptimize(solve_ground_state(kRef, g));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GroundState)->RangeMultiplier(2)->Range(512, 4096)->Unit(benchmark::kMillisecond)->Complexity();

void BM_EvolutionStep(benchmark::State& state) {
  const RadialGrid g = build_grid(kRef, static_cast<std::size_t>(state.range(0)), 20.0, {});
  RelaxationStepper st(g, kRef, gaussian(g));
  for (auto _ : state) st.step(1e-4);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EvolutionStep)->RangeMultiplier(2)->Range(512, 8192)->Complexity();

void BM_Classify(benchmark::State& state) {
  auto g = std::make_shared<const RadialGrid>(build_grid(kRef, 2048, 20.0, {}));
  const GroundStateBundle gs = solve_ground_state(kRef, g);
  const Field u = rescale_data(*g, kRef, gs.field(), 1.1, ScaleMode::amplitude);
  for (auto _ : state) benchmark::DoNotOptimize(classify(u, gs, DataSymmetry::radial));
}
BENCHMARK(BM_Classify);

}  // namespace

BENCHMARK_MAIN();
