#include <benchmark/benchmark.h>

#include "imcorrect/correction.hpp"
#include "imcorrect/eval.hpp"
#include "imcorrect/pipeline.hpp"
#include "imcorrect/slim.hpp"
#include "imcorrect/synthetic.hpp"

namespace {

using namespace imc;

DatasetBundle bench_bundle() {
  SyntheticConfig cfg;
  return split(synthetic_log(cfg), {}, cfg.seed);
}

NoiseResult bench_noise(const DatasetBundle& bundle) {
  NoiseSpec spec;
  spec.mode = NoiseSpec::Mode::Delete;
  spec.fraction = 0.05;
  spec.seed = 7;
  return generate_noise(bundle, spec);
}

void BM_SlimFit(benchmark::State& state) {
  const auto bundle = bench_bundle();
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_slim(bundle.train, {}));
  }
}
BENCHMARK(BM_SlimFit)->Unit(benchmark::kMillisecond);

void BM_SlimCorrection(benchmark::State& state) {
  const auto bundle = bench_bundle();
  const auto noise = bench_noise(bundle);
  const auto w = fit_slim(noise.noisy_train, {}).mapping;
  const FlipSet flips = noise.removed->reversed();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        unlearn(noise.noisy_train, w, flips, CorrectionMode::Both,
                [](const InteractionMatrix& cells) {
                  return fit_slim(cells, {}).mapping;
                }));
  }
}
BENCHMARK(BM_SlimCorrection)->Unit(benchmark::kMillisecond);

void BM_Predict(benchmark::State& state) {
  const auto bundle = bench_bundle();
  const auto w = fit_slim(bundle.train, {}).mapping;
  for (auto _ : state) {
    benchmark::DoNotOptimize(predict(bundle.train, w));
  }
}
BENCHMARK(BM_Predict)->Unit(benchmark::kMillisecond);

void BM_TopK(benchmark::State& state) {
  const auto bundle = bench_bundle();
  const auto w = fit_slim(bundle.train, {}).mapping;
  const auto scores = predict(bundle.train, w);
  for (auto _ : state) {
    benchmark::DoNotOptimize(topk(scores, bundle.train, 20));
  }
}
BENCHMARK(BM_TopK)->Unit(benchmark::kMillisecond);

void BM_GfcfFit(benchmark::State& state) {
  const auto bundle = bench_bundle();
  GfcfConfig cfg;
  cfg.rank = 32;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_gfcf(bundle.train, cfg));
  }
}
BENCHMARK(BM_GfcfFit)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
