#include <benchmark/benchmark.h>

#include "twirlkit/districts.h"
#include "twirlkit/presets.h"
#include "twirlkit/verification.h"

namespace twirlkit {
namespace {

void BM_EvaluatePreset(benchmark::State& state, const std::string& name) {
  Circuit c = *preset(name).circuit;
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(c));
}
BENCHMARK_CAPTURE(BM_EvaluatePreset, chsh, std::string("chsh"));
BENCHMARK_CAPTURE(BM_EvaluatePreset, bilocality, std::string("bilocality"));
BENCHMARK_CAPTURE(BM_EvaluatePreset, bigcircuit, std::string("bigcircuit"));

void BM_DollarMapChannel(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Rng rng(5);
  Factors in = {{"A", d}};
  Factors out = {{"B", d}};
  Simulator sim(z3_cyclic_rep(concat(in, out)), state.range(1) == 0 ? MapKind::kDollar : MapKind::kEuro);
  Superoperator ch = random_channel(in, out, rng);
  for (auto _ : state) benchmark::DoNotOptimize(sim.map(ch));
}
BENCHMARK(BM_DollarMapChannel)->ArgsProduct({{2, 3}, {0, 1}});

void BM_MapCircuit(benchmark::State& state) {
  Circuit c = *preset("bilocality").circuit;
  Simulator sim = simulator_for(c, "z2phase", MapKind::kDollar);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(map_circuit(sim, c)));
}
BENCHMARK(BM_MapCircuit);

void BM_Districts(benchmark::State& state) {
  Preset p = preset("bigcircuit");
  Distribution d = evaluate(*p.circuit);
  for (auto _ : state) benchmark::DoNotOptimize(district_factorization_check(p.structure, d, kDefaultTol));
}
BENCHMARK(BM_Districts);

void BM_GapReport(benchmark::State& state) {
  Preset p = preset("dbell");
  for (auto _ : state) benchmark::DoNotOptimize(gap_necessary_conditions(p.structure, p.metadata));
}
BENCHMARK(BM_GapReport);

}  // namespace
}  // namespace twirlkit

BENCHMARK_MAIN();
