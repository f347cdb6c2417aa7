#include <benchmark/benchmark.h>

#include <random>

#include "qsc/kernel_calc.hpp"
#include "qsc/parallel.hpp"

using namespace qsc;

namespace {

GridPtr bench_grid(int n) {
  std::vector<double> t, w;
  for (int x = 0; x < n; ++x) {
    t.push_back(0.1 * (x + 1));
    w.push_back(0.1);
  }
  return make_grid(t, w, 1);
}

// Sparse kernel with admissible entries, each point taking one of five roles.
KernelTable bench_kernel(const GridPtr& g, int dim_h, int count, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<int> role(0, 4);
  KernelTable k(g, dim_h);
  for (int i = 0; i < count; ++i) {
    Quad q;
    for (int x = 0; x < g->n(); ++x) {
      const int r = role(gen);
      if (r == 1) q.pm |= point(x);
      if (r == 2) q.cm |= point(x);
      if (r == 3) q.pc |= point(x);
      if (r == 4) q.cc |= point(x);
    }
    Mat b(k.block_rows(q), k.block_cols(q));
    for (Index r = 0; r < b.rows(); ++r)
      for (Index c = 0; c < b.cols(); ++c) b(r, c) = cplx(normal(gen), normal(gen));
    k.add(q, b);
  }
  return k;
}

void BM_EpsilonParallel(benchmark::State& state) {
  const KernelTable k = bench_kernel(bench_grid(static_cast<int>(state.range(0))), 2, 64, 1);
  for (auto _ : state) benchmark::DoNotOptimize(epsilon(k));
}

void BM_EpsilonSerial(benchmark::State& state) {
  const KernelTable k = bench_kernel(bench_grid(static_cast<int>(state.range(0))), 2, 64, 1);
  for (auto _ : state) benchmark::DoNotOptimize(epsilon_serial(k));
}

void BM_KernelMulParallel(benchmark::State& state) {
  const GridPtr g = bench_grid(static_cast<int>(state.range(0)));
  const KernelTable k = bench_kernel(g, 2, 32, 2), l = bench_kernel(g, 2, 32, 3);
  for (auto _ : state) benchmark::DoNotOptimize(kernel_mul(k, l));
}

void BM_KernelMulSerial(benchmark::State& state) {
  const GridPtr g = bench_grid(static_cast<int>(state.range(0)));
  const KernelTable k = bench_kernel(g, 2, 32, 2), l = bench_kernel(g, 2, 32, 3);
  for (auto _ : state) benchmark::DoNotOptimize(kernel_mul_serial(k, l));
}

}  // namespace

BENCHMARK(BM_EpsilonParallel)->DenseRange(4, 8, 2)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_EpsilonSerial)->DenseRange(4, 8, 2)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_KernelMulParallel)->DenseRange(4, 8, 2)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_KernelMulSerial)->DenseRange(4, 8, 2)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
