#include <benchmark/benchmark.h>

#include "ntb/abnormality_detector.hpp"
#include "ntb/dt_training.hpp"
#include "ntb/group_activity.hpp"
#include "ntb/synth_gen.hpp"

namespace {

void BM_DetectCorpus(benchmark::State& state) {
  ntb::ScenarioConfig cfg;
  const auto corpus = ntb::gen_abnormality_corpus(cfg);
  const auto scene = corpus.scene(48);
  const auto model = ntb::train(corpus.samples(scene), scene);
  std::vector<ntb::PatchRoute> routes;
  for (const auto& t : corpus.tracks) routes.push_back(ntb::route_from_trajectory(t, scene));
  for (auto _ : state) {
    for (const auto& r : routes) benchmark::DoNotOptimize(ntb::detect(r, model));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(routes.size()));
}
BENCHMARK(BM_DetectCorpus)->Unit(benchmark::kMillisecond);

void BM_CrowdRoc(benchmark::State& state) {
  ntb::CrowdScenarioConfig cfg;
  const auto seq = ntb::gen_crowd_sequence(cfg);
  ntb::CrowdParams params;
  params.center = seq.center;
  for (auto _ : state) benchmark::DoNotOptimize(ntb::crowd_roc(seq.flows, params, seq.truth));
}
BENCHMARK(BM_CrowdRoc)->Unit(benchmark::kMillisecond);

}  // namespace
