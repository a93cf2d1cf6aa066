#include <benchmark/benchmark.h>

#include "holediff/diffusion.hpp"
#include "holediff/escape.hpp"
#include "holediff/simulator.hpp"

using namespace holediff;

static void BM_CumulativeExact(benchmark::State& state) {
  const auto c = ModelConfig::symmetric(MapKind::Doubling, Rational(1, 7), Rational(2, 7));
  const Rational x(static_cast<long>(state.range(0)), 2 * state.range(0) + 1);
  for (auto _ : state) benchmark::DoNotOptimize(cumulative_exact(c, x));
}
BENCHMARK(BM_CumulativeExact)->Arg(1000)->Arg(100000);

static void BM_ScanPositions(benchmark::State& state) {
  const auto s = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(scan_positions(MapKind::Doubling, Placement::Symmetric, s));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(markov_position_count(s)));
}
BENCHMARK(BM_ScanPositions)->Arg(10)->Arg(14)->Unit(benchmark::kMillisecond);

static void BM_EscapeRate(benchmark::State& state) {
  const auto s = static_cast<unsigned>(state.range(0));
  const auto c = markov_position(MapKind::Doubling, Placement::Symmetric, s, 3);
  const auto P = build_transfer_matrix(c, s);
  for (auto _ : state) benchmark::DoNotOptimize(escape_rate(P));
}
BENCHMARK(BM_EscapeRate)->Arg(9)->Arg(12)->Unit(benchmark::kMillisecond);

static void BM_WalkerSteps(benchmark::State& state) {
  const auto c = ModelConfig::symmetric(MapKind::Doubling, Rational(1, 8), Rational(3, 16));
  const WordHoles holes(c);
  std::mt19937_64 rng = particle_generator(1, 0);
  BitSource bits(rng);
  BitstreamWalker w(MapKind::Doubling, rng());
  for (auto _ : state) benchmark::DoNotOptimize(w.step(holes, bits.next()));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_WalkerSteps);
BENCHMARK_MAIN();
