#include <benchmark/benchmark.h>

#include "surecost/driver.hpp"
#include "surecost/generators.hpp"
#include "surecost/montecarlo.hpp"

namespace {

using namespace surecost;

void BM_SupportMdpCheeseLarge(benchmark::State& state) {
  const Pomdp p = prepare(gen_cheese(CheeseSize::kLarge));
  for (auto _ : state) {
    benchmark::DoNotOptimize(analyze_winning(p).num_winning());
  }
}
BENCHMARK(BM_SupportMdpCheeseLarge);

void BM_BoundLowerBoundFamily(benchmark::State& state) {
  const Pomdp p = prepare(gen_lower_bound(static_cast<std::size_t>(state.range(0))));
  const WinningTable w = analyze_winning(p);
  const ProductChain ch = build_chain(p, w);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hitting_bound(ch).u_allow);
  }
  state.counters["chain"] = static_cast<double>(ch.size());
}
BENCHMARK(BM_BoundLowerBoundFamily)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMicrosecond);

void BM_ExactHorizonRobot(benchmark::State& state) {
  const Pomdp p = prepare(gen_robot(RobotVariant::kRandom));
  const WinningTable w = analyze_winning(p);
  const auto k = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(exact_vi(p, w, k).t_k);
  }
}
BENCHMARK(BM_ExactHorizonRobot)->DenseRange(4, 10, 2)->Unit(benchmark::kMillisecond);

void BM_RtdpCheese(benchmark::State& state) {
  const Pomdp p = prepare(gen_cheese());
  const WinningTable w = analyze_winning(p);
  RtdpOptions o;
  o.trials = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(rtdp_backend(p, w, 10, o).t_k);
  }
}
BENCHMARK(BM_RtdpCheese)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_ApproximateToy(benchmark::State& state) {
  const Pomdp p = gen_toy();
  SolveOptions o;
  o.epsilon = 1e-6;
  for (auto _ : state) {
    benchmark::DoNotOptimize(approximate(p, o).report.final_k);
  }
}
BENCHMARK(BM_ApproximateToy);

void BM_SimulateFallback(benchmark::State& state) {
  const Pomdp p = prepare(gen_grid());
  const WinningTable w = analyze_winning(p);
  const CompositePolicy cp = CompositePolicy::fallback_only(w);
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate(p, cp, 1000, 1, 100000).mean);
  }
}
BENCHMARK(BM_SimulateFallback)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
