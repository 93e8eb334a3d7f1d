#include <benchmark/benchmark.h>

#include <random>

#include <navcurate/compat_filter.hpp>
#include <navcurate/eval_metrics.hpp>
#include <navcurate/sample_builder.hpp>
#include <navcurate/segmentation.hpp>
#include <navcurate/synth_gen.hpp>

using namespace navcurate;

namespace {

std::vector<Eigen::Vector2d> random_curve(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> d(0, 1);
  std::vector<Eigen::Vector2d> p(n);
  for (auto& x : p) x = {d(rng), d(rng)};
  return p;
}

RawTrajectory walk(double seconds) {
  SynthSpec s;
  s.kind = SynthKind::Arc;
  s.yaw_rate_deg_s = 3;
  s.duration_s = seconds;
  s.position_noise_m = 0.01;
  return generate(s);
}

}  // namespace

static void BM_Frechet(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = random_curve(rng, n), q = random_curve(rng, n);
  for (auto _ : state) benchmark::DoNotOptimize(frechet_distance(p, q));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Frechet)->RangeMultiplier(4)->Range(8, 512)->Complexity(benchmark::oNSquared);

static void BM_Segment(benchmark::State& state) {
  const RawTrajectory t = walk(static_cast<double>(state.range(0)) * 120);
  for (auto _ : state) benchmark::DoNotOptimize(segment(t));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(t.poses.size()));
}
BENCHMARK(BM_Segment)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_FilterClip(benchmark::State& state) {
  const Clip clip = segment(walk(120)).front();
  const FilterConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(run_filters(clip, {}, cfg));
  state.SetItemsProcessed(state.iterations() * clip.size());
}
BENCHMARK(BM_FilterClip)->Unit(benchmark::kMicrosecond);

static void BM_FilterCorpus(benchmark::State& state) {
  const auto clips = segment(walk(20 * 120));
  const auto workers = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(filter_clips(clips, {}, {}, {}, workers));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(clips.size()));
}
BENCHMARK(BM_FilterCorpus)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

static void BM_BuildCorpus(benchmark::State& state) {
  const auto clips = segment(walk(10 * 120));
  std::vector<LandmarkAnnotation> landmarks;
  std::vector<FilterVerdict> verdicts;
  for (const auto& c : clips) {
    for (auto& l : generate_landmarks(c, 20, 3).landmarks) landmarks.push_back(std::move(l));
    verdicts.push_back({c.clip_id, true, {}, {}});
  }
  SamplerConfig cfg;
  cfg.draws_per_landmark = 4;
  for (auto _ : state) benchmark::DoNotOptimize(build_corpus(clips, landmarks, verdicts, cfg, {}, 1));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(landmarks.size()) * cfg.draws_per_landmark);
}
BENCHMARK(BM_BuildCorpus)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
