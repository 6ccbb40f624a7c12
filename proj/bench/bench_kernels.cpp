#include <benchmark/benchmark.h>

#include <boost/random/normal_distribution.hpp>

#include "amcci/chains.hpp"
#include "amcci/fixedb.hpp"
#include "amcci/lagwindow.hpp"
#include "amcci/mercer.hpp"

using namespace amcci;

namespace {

const MercerDecomposition& bartlett_decomp() {
  static const auto d = nystrom_decompose(WeightKernel::bartlett(), 1000);
  return d;
}

const ItoGrid& bartlett_grid() {
  static const ItoGrid g(WeightKernel::bartlett(), 256);
  return g;
}

void BM_TEigenSerial(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::sample_T_eigen(bartlett_decomp(), state.range(0), 7));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_TEigenParallel(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_T_eigen(bartlett_decomp(), state.range(0), 7, 0));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ItoSerial(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::sample_chi2_ito(bartlett_grid(), state.range(0), 7));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ItoParallel(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_chi2_ito(bartlett_grid(), state.range(0), 7, 0));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

std::vector<double> ar1_path(std::size_t n) { return ar1_chain(0.5, n, 3).h_path; }

void BM_AcovDirect(benchmark::State& state) {
  const auto x = ar1_path(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::autocovariances_direct(x, x.size() - 1));
  }
}

void BM_AcovFft(benchmark::State& state) {
  const auto x = ar1_path(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(autocovariances_fft(x, x.size() - 1));
}

}  // namespace

BENCHMARK(BM_TEigenSerial)->Arg(1 << 16);
BENCHMARK(BM_TEigenParallel)->Arg(1 << 16);
BENCHMARK(BM_ItoSerial)->Arg(1 << 10);
BENCHMARK(BM_ItoParallel)->Arg(1 << 10);
BENCHMARK(BM_AcovDirect)->Arg(1 << 10)->Arg(1 << 13);
BENCHMARK(BM_AcovFft)->Arg(1 << 10)->Arg(1 << 13)->Arg(1 << 16);

BENCHMARK_MAIN();
