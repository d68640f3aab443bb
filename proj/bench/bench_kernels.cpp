#include <benchmark/benchmark.h>

#include <vector>

#include "sched/adversary.hpp"
#include "sched/generators.hpp"
#include "sched/throughput.hpp"

using namespace sched;

namespace {

std::vector<std::int64_t> releases(std::int64_t n) {
  std::vector<std::int64_t> a;
  for (std::int64_t t = 0; t < n; ++t) a.push_back(n * n / (n - t));
  return a;
}

void BM_OffReference(benchmark::State& state) {
  const auto n = state.range(0);
  const auto a = releases(n);
  for (auto _ : state) benchmark::DoNotOptimize(adversary::off_series_reference(a, n));
}

void BM_OffIncremental(benchmark::State& state) {
  const auto n = state.range(0);
  const auto a = releases(n);
  for (auto _ : state) benchmark::DoNotOptimize(adversary::off_series_incremental(a, n));
}

void BM_OffParallel(benchmark::State& state) {
  const auto n = state.range(0);
  const auto a = releases(n);
  for (auto _ : state) benchmark::DoNotOptimize(adversary::off_series_parallel(a, n));
}

void BM_RatioSerial(benchmark::State& state) {
  const auto instance = gen::upper_triangular(4, state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        throughput::estimate_ratio(instance, throughput::Algorithm::PerturbedGreedy, 500, 1));
  }
}

void BM_RatioParallel(benchmark::State& state) {
  const auto instance = gen::upper_triangular(4, state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        throughput::estimate_ratio_parallel(instance, throughput::Algorithm::PerturbedGreedy, 500, 1));
  }
}

}  // namespace

BENCHMARK(BM_OffReference)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OffIncremental)->Arg(1000)->Arg(4000)->Arg(1000000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OffParallel)->Arg(1000)->Arg(4000)->Arg(1000000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RatioSerial)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RatioParallel)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
