#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "armwatch/detect.hpp"
#include "armwatch/geometry.hpp"
#include "armwatch/pipeline.hpp"
#include "armwatch/synth.hpp"
#include "armwatch/tracking.hpp"

using namespace armwatch;

namespace {

synth::ScenarioScript hall(int rows, int cols, std::int64_t frames) {
  synth::ScenarioScript s;
  s.seed = 5;
  s.duration_frames = frames;
  s.dropout = 0.05;
  s.seats = synth::grid_seats(rows, cols);
  s.actions.push_back({1, synth::ActionKind::kExchangeObject, frames / 3, 2 * frames / 3, 2, std::nullopt});
  return s;
}

void BM_AngleBetween(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-500, 500);
  std::vector<Vector2> v(1024);
  for (auto& x : v) x = {u(rng), u(rng)};
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(try_angle_between(v[i & 1023], v[(i + 1) & 1023]));
    ++i;
  }
}
BENCHMARK(BM_AngleBetween);

void BM_DetectEpisodes(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(120, 170);
  AngleSeries s;
  for (std::int64_t f = 0; f < state.range(0); ++f) {
    ArmAngleSample a;
    a.frame = f;
    a.timestamp_ms = frame_timestamp_ms(f, s.fps);
    a.elbow_angle_deg = u(rng);
    a.shoulder_neck_angle_deg = 120.0;
    s.samples.push_back(a);
  }
  const DetectorConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(detect_episodes(s, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DetectEpisodes)->Arg(1000)->Arg(10000);

void BM_TrackerUpdate(benchmark::State& state) {
  const auto frames = synth::generate(hall(static_cast<int>(state.range(0)), 4, 200)).frames;
  for (auto _ : state) {
    TrackAssociator assoc;
    for (const auto& f : frames) assoc.update(f);
    benchmark::DoNotOptimize(assoc.live_count());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(frames.size()));
}
BENCHMARK(BM_TrackerUpdate)->Arg(4)->Arg(8);

void BM_Analyze(benchmark::State& state) {
  const auto frames = synth::generate(hall(4, 4, state.range(0))).frames;
  PipelineOptions opt;
  opt.fps = 25.0;
  opt.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(analyze(frames, opt));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Analyze)->Arg(300)->Arg(3000)->Unit(benchmark::kMillisecond);

void BM_Generate(benchmark::State& state) {
  const auto script = hall(4, 4, 300);
  for (auto _ : state) benchmark::DoNotOptimize(synth::generate(script));
}
BENCHMARK(BM_Generate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
