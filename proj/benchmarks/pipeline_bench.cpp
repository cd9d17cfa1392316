#include <benchmark/benchmark.h>

#include <filesystem>

#include "coach/engine.hpp"
#include "coach/io.hpp"

namespace {

const std::filesystem::path kData = COACH_BENCH_DATA_DIR;

const coach::engine::Engine& shipped() {
  static const auto engine = coach::engine::Engine::load(kData / "config.json");
  return engine;
}

void BM_AnalyzeFixture(benchmark::State& state) {
  shipped();  // keep config loading out of the timed loop
  const auto draft = coach::io::read_file(kData / "fixtures" / "draft.txt");
  const auto intro = coach::io::read_file(kData / "fixtures" / "intro.txt");
  for (auto _ : state) {
    const auto d = shipped().parse_text(draft);
    const auto s = shipped().parse_text(intro);
    benchmark::DoNotOptimize(shipped().analyze(d, &s));
  }
}
BENCHMARK(BM_AnalyzeFixture)->Unit(benchmark::kMillisecond);

// Parsing, organization, features and facets for a 1,000-word text against itself.
void BM_Analyze1000Words(benchmark::State& state) {
  const auto text = coach::io::read_file(kData / "fixtures" / "intro_1000w.txt");
  for (auto _ : state) {
    const auto doc = shipped().parse_text(text);
    benchmark::DoNotOptimize(shipped().analyze(doc, &doc));
  }
}
BENCHMARK(BM_Analyze1000Words)->Unit(benchmark::kMillisecond);

void BM_AlignReference(benchmark::State& state) {
  const auto intro = shipped().parse_text(coach::io::read_file(kData / "fixtures" / "intro_1000w.txt"));
  const auto ref = shipped().parse_text(coach::io::read_file(kData / "fixtures" / "reference.txt"));
  for (auto _ : state) benchmark::DoNotOptimize(shipped().align(ref, intro, 3));
}
BENCHMARK(BM_AlignReference)->Unit(benchmark::kMillisecond);

}  // namespace
