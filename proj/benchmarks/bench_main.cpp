#include <benchmark/benchmark.h>

#include <vector>

#include "signbias/image.hpp"
#include "signbias/pose_metrics.hpp"
#include "signbias/quality.hpp"
#include "signbias/rng.hpp"
#include "signbias/sampler.hpp"
#include "signbias/stats.hpp"

using namespace signbias;

namespace {

HandTrajectory random_trajectory(std::size_t n, Rng& rng) {
  HandTrajectory h;
  for (std::size_t i = 0; i < n; ++i) {
    h.t.push_back(static_cast<double>(i) * 0.25);
    std::array<Point, kHandKeypoints> p{};
    for (auto& q : p) q = {rng.normal(), rng.normal()};
    h.points.push_back(p);
  }
  return h;
}

void BM_Frechet(benchmark::State& state) {
  Rng rng(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_trajectory(n, rng), b = random_trajectory(n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(discrete_frechet(a, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Frechet)->RangeMultiplier(2)->Range(8, 128)->Complexity(benchmark::oNSquared);

void BM_Brisque(benchmark::State& state) {
  Rng rng(2);
  const auto side = static_cast<std::size_t>(state.range(0));
  GrayImage img(side, side);
  for (auto& p : img.pixels()) p = 128.0 + 30.0 * rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(brisque_features(img));
}
BENCHMARK(BM_Brisque)->Arg(64)->Arg(128)->Arg(256);

void BM_Spearman(benchmark::State& state) {
  Rng rng(3);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = rng.normal();
    y[i] = static_cast<double>(rng.below(2));
  }
  for (auto _ : state) benchmark::DoNotOptimize(spearman(x, y));
}
BENCHMARK(BM_Spearman)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_SamplerEpoch(benchmark::State& state) {
  Rng rng(4);
  SamplerPlan plan;
  for (int i = 0; i < state.range(0); ++i) plan.weights.push_back({"v" + std::to_string(i), 0.01 + rng.uniform()});
  plan.rng_seed = 5;
  const WeightedSampler s(plan);
  std::uint64_t e = 0;
  for (auto _ : state) benchmark::DoNotOptimize(s.epoch(e++));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SamplerEpoch)->Arg(1000)->Arg(100000);

}  // namespace
BENCHMARK_MAIN();
