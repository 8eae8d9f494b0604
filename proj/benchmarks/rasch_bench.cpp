#include <benchmark/benchmark.h>

#include "rasch/geometry.hpp"
#include "rasch/optimality.hpp"
#include "rasch/optimizer.hpp"

using namespace rasch;

namespace {

ParameterVector path_point(const InteractionModel& m, double lambda) {
  return diagonal_family(m, lambda);
}

}  // namespace

static void BM_KwCertificate(benchmark::State& state) {
  const InteractionModel m(static_cast<int>(state.range(0)), 2);
  const ParameterVector theta = path_point(m, 0.4);
  const Design w = corner_design(m);
  for (auto _ : state) benchmark::DoNotOptimize(kw_certificate(w, theta, m));
  state.SetComplexityN(std::int64_t{1} << state.range(0));
}
BENCHMARK(BM_KwCertificate)->DenseRange(4, 12, 2)->Complexity();

static void BM_CornerInequalities(benchmark::State& state) {
  const InteractionModel m(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(corner_inequalities(m));
}
BENCHMARK(BM_CornerInequalities)->DenseRange(4, 12, 2);

static void BM_EvaluateInequalities(benchmark::State& state) {
  const InteractionModel m(static_cast<int>(state.range(0)), 2);
  const auto system = corner_inequalities(m);
  const ParameterVector theta = path_point(m, 0.3);
  for (auto _ : state) {
    double total = 0.0;
    for (const auto& q : system) total += evaluate_inequality(q, theta);
    benchmark::DoNotOptimize(total);
  }
}
BENCHMARK(BM_EvaluateInequalities)->DenseRange(4, 12, 2);

static void BM_OptimizeDesign(benchmark::State& state) {
  const InteractionModel m(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const ParameterVector theta = path_point(m, 0.6);
  for (auto _ : state) benchmark::DoNotOptimize(optimize_design(theta, m));
}
BENCHMARK(BM_OptimizeDesign)->Args({2, 1})->Args({3, 2})->Args({4, 2})->Args({6, 2})
    ->Unit(benchmark::kMillisecond);

static void BM_AnalyticCenter(benchmark::State& state) {
  const InteractionModel m(2, 1);
  const LmiSlice slice = lmi_slice(polytope_vertices(path_point(m, 0.5), m));
  for (auto _ : state) benchmark::DoNotOptimize(analytic_center(slice));
}
BENCHMARK(BM_AnalyticCenter);

BENCHMARK_MAIN();
