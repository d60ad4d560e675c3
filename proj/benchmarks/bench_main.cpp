#include <benchmark/benchmark.h>

#include <vector>

#include "onmf/limits.hpp"
#include "onmf/sampler.hpp"
#include "onmf/specfun.hpp"
#include "onmf/thermo.hpp"

using namespace onmf;

static void BM_BesselRatio(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  double kappa = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(specfun::bessel_ratio(dim, kappa));
    kappa = kappa > 60.0 ? 0.1 : kappa * 1.07;
  }
}
BENCHMARK(BM_BesselRatio)->Arg(2)->Arg(3)->Arg(8);

static void BM_BesselI(benchmark::State& state) {
  const specfun::BesselOrder nu(static_cast<int>(state.range(0)));
  double x = 0.05;
  for (auto _ : state) {
    benchmark::DoNotOptimize(specfun::bessel_i(nu, x));
    x = x > 300.0 ? 0.05 : x * 1.11;
  }
}
BENCHMARK(BM_BesselI)->Arg(0)->Arg(1)->Arg(7);

static void BM_VmfSample(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const double kappa = static_cast<double>(state.range(1));
  Rng rng(7);
  std::vector<double> mu(dim, 0.0), out(dim);
  mu[0] = 1.0;
  for (auto _ : state) {
    sampler::vmf_sample(mu, kappa, rng, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_VmfSample)->Args({2, 1})->Args({3, 1})->Args({3, 20})->Args({4, 100});

static void BM_GibbsSweep(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const auto n = state.range(1);
  auto chain = sampler::make_chain({dim, static_cast<double>(dim), n}, 11, 0);
  for (auto _ : state) sampler::gibbs_sweep(chain);
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_GibbsSweep)->Args({2, 1000})->Args({3, 1000})->Args({3, 4000})->Unit(benchmark::kMicrosecond);

static void BM_FixedPoint(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(thermo::solve_fixed_point(dim, 1.7 * dim));
}
BENCHMARK(BM_FixedPoint)->Arg(2)->Arg(3)->Arg(4);

static void BM_CriticalCdf(benchmark::State& state) {
  const auto law = limits::LimitLaw::critical_standardized(3);
  double t = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(law.cdf(t));
    t = t > 4.0 ? 0.01 : t + 0.013;
  }
}
BENCHMARK(BM_CriticalCdf);
BENCHMARK_MAIN();
