#include <benchmark/benchmark.h>

#include <random>

#include "coach/metrics.hpp"

namespace {

std::vector<std::string> random_stream(std::size_t n, std::size_t vocab) {
  std::mt19937_64 rng(n * 31 + vocab);
  std::uniform_int_distribution<std::size_t> pick(0, vocab - 1);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("w" + std::to_string(pick(rng)));
  return out;
}

void BM_Mtld(benchmark::State& state) {
  const auto t = random_stream(static_cast<std::size_t>(state.range(0)), 200);
  for (auto _ : state) benchmark::DoNotOptimize(coach::metrics::mtld(t));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Mtld)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void BM_Mattr(benchmark::State& state) {
  const auto t = random_stream(static_cast<std::size_t>(state.range(0)), 200);
  for (auto _ : state) benchmark::DoNotOptimize(coach::metrics::mattr(t, 50));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Mattr)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void BM_Rouge3(benchmark::State& state) {
  const auto cand = random_stream(static_cast<std::size_t>(state.range(0)), 50);
  const auto ref = random_stream(static_cast<std::size_t>(state.range(0)) * 4, 50);
  for (auto _ : state) benchmark::DoNotOptimize(coach::metrics::rouge_n(cand, ref, 3));
}
BENCHMARK(BM_Rouge3)->Arg(200)->Arg(2000);

}  // namespace
