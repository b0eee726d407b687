#include <benchmark/benchmark.h>

#include "ntb/dt_training.hpp"
#include "ntb/synth_gen.hpp"

namespace {

void BM_Train(benchmark::State& state) {
  ntb::ScenarioConfig cfg;
  const auto corpus = ntb::gen_abnormality_corpus(cfg);
  const auto scene = corpus.scene(static_cast<double>(state.range(0)));
  const auto samples = corpus.samples(scene);
  for (auto _ : state) benchmark::DoNotOptimize(ntb::train(samples, scene));
}
BENCHMARK(BM_Train)->Arg(48)->Arg(32)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_TrainWithClassifier(benchmark::State& state) {
  ntb::ScenarioConfig cfg;
  const auto corpus = ntb::gen_abnormality_corpus(cfg);
  const auto scene = corpus.scene(48);
  const auto samples = corpus.samples(scene);
  for (auto _ : state) benchmark::DoNotOptimize(ntb::train_with_classifier(samples, scene));
}
BENCHMARK(BM_TrainWithClassifier)->Unit(benchmark::kMillisecond);

}  // namespace
