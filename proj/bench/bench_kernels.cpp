// Serial reference kernels against their OpenMP counterparts.
#include <benchmark/benchmark.h>

#include "wavevel/differentiation.hpp"
#include "wavevel/field.hpp"
#include "wavevel/velocities.hpp"

namespace {

using namespace wavevel;

Grid bench_grid(std::int64_t n) {
  const auto e = static_cast<std::size_t>(n);
  return Grid({e, e}, {0.05, 0.05}, {-0.05 * (n / 2), -0.05 * (n / 2)});
}

AnalyticField bench_field() { return AnalyticField::translating_gaussian({0.7, 0.2}, 1.0); }

const SampledField& cached_field(std::int64_t n) {
  static std::int64_t cached_n = -1;
  static SampledField cached;
  if (cached_n != n) {
    cached = sample(bench_field(), bench_grid(n), uniform_times(0.0, 0.01, 5));
    cached_n = n;
  }
  return cached;
}

void BM_sample_serial(benchmark::State& state) {
  const Grid g = bench_grid(state.range(0));
  const auto times = uniform_times(0.0, 0.01, 5);
  for (auto _ : state) benchmark::DoNotOptimize(reference::sample(bench_field(), g, times));
}

void BM_sample_parallel(benchmark::State& state) {
  const Grid g = bench_grid(state.range(0));
  const auto times = uniform_times(0.0, 0.01, 5);
  for (auto _ : state) benchmark::DoNotOptimize(sample(bench_field(), g, times));
}

void BM_fd_jet_field_serial(benchmark::State& state) {
  const auto& f = cached_field(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(reference::fd_jet_field(f, 2));
}

void BM_fd_jet_field_parallel(benchmark::State& state) {
  const auto& f = cached_field(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fd_jet_field(f, 2));
}

void BM_velocity_field_serial(benchmark::State& state) {
  const JetField jets = fd_jet_field(cached_field(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(reference::velocity_field(jets, 1));
}

void BM_velocity_field_parallel(benchmark::State& state) {
  const JetField jets = fd_jet_field(cached_field(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(velocity_field(jets, 1));
}

}  // namespace

BENCHMARK(BM_sample_serial)->Arg(64)->Arg(256);
BENCHMARK(BM_sample_parallel)->Arg(64)->Arg(256);
BENCHMARK(BM_fd_jet_field_serial)->Arg(64)->Arg(256);
BENCHMARK(BM_fd_jet_field_parallel)->Arg(64)->Arg(256);
BENCHMARK(BM_velocity_field_serial)->Arg(64)->Arg(256);
BENCHMARK(BM_velocity_field_parallel)->Arg(64)->Arg(256);

BENCHMARK_MAIN();
