#include <benchmark/benchmark.h>

#include <random>

#include "ntb/route_map.hpp"

namespace {

ntb::TransmissionNetwork dense(std::size_t n) {
  std::mt19937_64 rng(n);
  std::uniform_real_distribution<double> u(0.01, 10.0);
  ntb::TransmissionNetwork net(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) net.set(i, j, u(rng));
  }
  return net;
}

void BM_Sbip(benchmark::State& state) {
  const auto net = dense(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ntb::sbip(net, 0));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Sbip)->RangeMultiplier(2)->Range(16, 512)->Complexity(benchmark::oNSquared);

void BM_SbipFullScan(benchmark::State& state) {
  const auto net = dense(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ntb::sbip_full_scan(net, 0));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SbipFullScan)->RangeMultiplier(2)->Range(16, 128)->Complexity(benchmark::oNCubed);

}  // namespace
