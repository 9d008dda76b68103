// Parallel grid kernels vs their serial reference implementations.

#include <benchmark/benchmark.h>

#include <random>

#include "nilforms/bundlenum.hpp"
#include "nilforms/grid.hpp"

using namespace nilforms;

namespace {

std::vector<double> random_field(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> f(n);
  for (double& v : f) v = g(rng);
  return f;
}

void bm_diff_axis_omp(benchmark::State& state) {
  TorusGrid g(3, static_cast<int>(state.range(0)));
  auto in = random_field(g.npoints(), 1);
  std::vector<double> out;
  for (auto _ : state) {
    kernels::diff_axis(g, in, out, 1, Scheme::Forward);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * g.npoints());
}

void bm_diff_axis_serial(benchmark::State& state) {
  TorusGrid g(3, static_cast<int>(state.range(0)));
  auto in = random_field(g.npoints(), 1);
  std::vector<double> out;
  for (auto _ : state) {
    ref::diff_axis(g, in, out, 1, Scheme::Forward);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * g.npoints());
}

void bm_dot_omp(benchmark::State& state) {
  auto a = random_field(static_cast<std::size_t>(state.range(0)), 2);
  auto b = random_field(a.size(), 3);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::dot(a, b));
  state.SetItemsProcessed(state.iterations() * a.size());
}

void bm_dot_serial(benchmark::State& state) {
  auto a = random_field(static_cast<std::size_t>(state.range(0)), 2);
  auto b = random_field(a.size(), 3);
  for (auto _ : state) benchmark::DoNotOptimize(ref::dot(a, b));
  state.SetItemsProcessed(state.iterations() * a.size());
}

void bm_invariant_laplacian(benchmark::State& state) {
  Eigen::MatrixXd c(2, 2);
  c << 0, 1, -1, 0;
  BundleMetric M{c, {}, 1.0, {}};
  TorusGrid g(2, static_cast<int>(state.range(0)));
  InvariantComplex C(M, g);
  BundleField x(g, 1);
  std::mt19937 rng(4);
  std::normal_distribution<double> d;
  for (auto& comp : x.horiz.comps)
    for (double& v : comp) v = d(rng);
  for (auto& comp : x.vert.comps)
    for (double& v : comp) v = d(rng);
  for (auto _ : state) {
    BundleField y = C.apply_laplacian(x);
    benchmark::DoNotOptimize(y.horiz.comps[0].data());
  }
  state.SetItemsProcessed(state.iterations() * g.npoints());
}

}  // namespace

BENCHMARK(bm_diff_axis_omp)->Arg(32)->Arg(64);
BENCHMARK(bm_diff_axis_serial)->Arg(32)->Arg(64);
BENCHMARK(bm_dot_omp)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(bm_dot_serial)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(bm_invariant_laplacian)->Arg(64)->Arg(128);

BENCHMARK_MAIN();
