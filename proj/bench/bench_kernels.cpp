// Serial reference kernels against their OpenMP counterparts. Run with
// OMP_NUM_THREADS set to compare scaling.

#include <benchmark/benchmark.h>

#include <vector>

#include "sphdiff/excursion.hpp"
#include "sphdiff/synthesis_kernels.hpp"

using namespace sphdiff;

namespace {

HarmonicCoefficients field(int lmax) {
  return sample_coefficients(reference_spectrum(lmax), 3);
}

void BM_synthesis_serial(benchmark::State& state) {
  const int lmax = static_cast<int>(state.range(0));
  const auto a = field(lmax);
  const SynthesisPlan plan(lmax, midpoint_thetas(lmax + 1), 2 * lmax + 2);
  std::vector<double> out(static_cast<std::size_t>(plan.n_theta()) * plan.n_phi());
  for (auto _ : state) {
    plan.run_serial(a, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_synthesis_parallel(benchmark::State& state) {
  const int lmax = static_cast<int>(state.range(0));
  const auto a = field(lmax);
  const SynthesisPlan plan(lmax, midpoint_thetas(lmax + 1), 2 * lmax + 2);
  std::vector<double> out(static_cast<std::size_t>(plan.n_theta()) * plan.n_phi());
  for (auto _ : state) {
    plan.run_parallel(a, out);
    benchmark::DoNotOptimize(out.data());
  }
}

McSupOptions mc_options() {
  McSupOptions opt;
  opt.n_real = 16;
  opt.n_theta = 64;
  opt.n_phi = 128;
  return opt;
}

void BM_mc_sup_serial(benchmark::State& state) {
  const auto p = ModelParams::unit();
  const auto s = reference_spectrum(static_cast<int>(state.range(0)));
  const auto eta = TimePoint::make(p, 0.001);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mc_sup_distribution_serial(s, p, eta, mc_options()).values.data());
  }
}

void BM_mc_sup_parallel(benchmark::State& state) {
  const auto p = ModelParams::unit();
  const auto s = reference_spectrum(static_cast<int>(state.range(0)));
  const auto eta = TimePoint::make(p, 0.001);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mc_sup_distribution(s, p, eta, mc_options()).values.data());
  }
}

void BM_evolution_factors(benchmark::State& state) {
  const auto p = ModelParams::unit();
  const auto eta = TimePoint::make(p, 0.3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(evolution_factors(p, static_cast<int>(state.range(0)), eta).data());
  }
}

}  // namespace

BENCHMARK(BM_synthesis_serial)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_synthesis_parallel)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_mc_sup_serial)->Arg(63)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_mc_sup_parallel)->Arg(63)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_evolution_factors)->Arg(512)->Arg(4096)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
