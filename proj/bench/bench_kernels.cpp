// Serial reference vs OpenMP path of the data-parallel kernels.

#include "sgspline/geometry.hpp"
#include "sgspline/kernels.hpp"
#include "sgspline/quad_project.hpp"

#include <benchmark/benchmark.h>

using namespace sgspline;

namespace {

Execution mode(const benchmark::State& s) {
  return s.range(0) ? Execution::Parallel : Execution::Serial;
}

void BM_EvalOnGrid(benchmark::State& state) {
  const int level = static_cast<int>(state.range(1));
  CoefficientTensor u(2, {level, level});
  for (std::size_t i = 0; i < u.coefficients.size(); ++i) u.coefficients[i] = 1.0 / (1.0 + i);
  const CompositeRule grid(level, 5);
  for (auto _ : state) benchmark::DoNotOptimize(eval_on_grid(u, grid, {}, mode(state)));
}

void BM_SampleTarget(benchmark::State& state) {
  const auto f = make_builtin_target("sinpi_exp", 2);
  const CompositeRule grid(static_cast<int>(state.range(1)), 4);
  const std::vector<std::span<const double>> nodes(2, grid.nodes());
  const std::vector<int> alpha{0, 0};
  for (auto _ : state) benchmark::DoNotOptimize(kernels::sample_target(*f, nodes, alpha, mode(state)));
}

void BM_WeightedNorm(benchmark::State& state) {
  const CompositeRule grid(static_cast<int>(state.range(1)), 4);
  NdArray v({grid.size(), grid.size()}, 0.5);
  const std::vector<std::span<const double>> w(2, grid.weights());
  for (auto _ : state) benchmark::DoNotOptimize(kernels::weighted_sum_squares(v, w, mode(state)));
}

void BM_MappedGram(benchmark::State& state) {
  const GeometryMap map = GeometryMap::distorted_square();
  for (auto _ : state)
    benchmark::DoNotOptimize(mapped_gram(map, 2, static_cast<int>(state.range(1)), mode(state)));
}

}  // namespace

BENCHMARK(BM_EvalOnGrid)->ArgsProduct({{0, 1}, {6, 8}});
BENCHMARK(BM_SampleTarget)->ArgsProduct({{0, 1}, {6, 8}});
BENCHMARK(BM_WeightedNorm)->ArgsProduct({{0, 1}, {6, 8}});
BENCHMARK(BM_MappedGram)->ArgsProduct({{0, 1}, {3, 4}});

BENCHMARK_MAIN();
