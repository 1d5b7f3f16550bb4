#include <benchmark/benchmark.h>

#include "ifb/analysis.hpp"
#include "ifb/coupled.hpp"
#include "ifb/exact.hpp"
#include "ifb/free_boundary.hpp"
#include "ifb/infinity.hpp"
#include "ifb/laplace.hpp"

using namespace ifb;

namespace {

Grid grid_for(const benchmark::State& state) { return unit_box(2, 1.0 / static_cast<double>(state.range(0))); }

void BM_InfinityResidual(benchmark::State& state) {
  const Grid g = grid_for(state);
  const ScalarField u = sample(example_radial().u, g);
  const ScalarField f = ScalarField::constant(g, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(infinity_scheme_residual(u, f));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(g.size()));
}
BENCHMARK(BM_InfinityResidual)->Arg(64)->Arg(128)->Arg(256);

void BM_InfinitySolve(benchmark::State& state) {
  const Grid g = grid_for(state);
  const ScalarField trace = sample(example_radial().u, g);
  const ScalarField f = ScalarField::constant(g, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_infinity_poisson(g, f, trace, InfinitySolveParams{}));
}
BENCHMARK(BM_InfinitySolve)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_PoissonSolve(benchmark::State& state) {
  const Grid g = grid_for(state);
  const ScalarField trace = sample(example_radial().v, g);
  const ScalarField f = ScalarField::constant(g, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_poisson(g, f, trace, SorParams{}));
}
BENCHMARK(BM_PoissonSolve)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_ObstacleSolve(benchmark::State& state) {
  const Grid g = grid_for(state);
  const ScalarField trace = sample(example_halfspace(0.0, 0.0).v, g);
  const ScalarField f = ScalarField::constant(g, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_obstacle_psor(g, f, trace, PsorParams{}));
}
BENCHMARK(BM_ObstacleSolve)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_CoupledSolve(benchmark::State& state) {
  const Grid g = grid_for(state);
  const ExactPair pair = example_radial();
  ProblemSpec spec;
  spec.grid = g;
  spec.f = ScalarField::constant(g, 1.0);
  spec.g = ScalarField::constant(g, 1.0);
  spec.phi = sample(pair.u, g);
  spec.psi = sample(pair.v, g);
  const PenalizationSchedule schedule{{1e-1, 1e-2}, 1e-6, 400};
  for (auto _ : state) benchmark::DoNotOptimize(solve_coupled(spec, schedule, CoupledParams{}));
}
BENCHMARK(BM_CoupledSolve)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_Inclusions(benchmark::State& state) {
  const Grid g = grid_for(state);
  const ExactPair pair = example_uncoupled();
  const ScalarField u = sample(pair.u, g);
  const ScalarField v = sample(pair.v, g);
  const Thresholds tau = Thresholds::scaled(g.h);
  for (auto _ : state) benchmark::DoNotOptimize(check_inclusions(u, v, tau));
}
BENCHMARK(BM_Inclusions)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_ClassifyBlowup(benchmark::State& state) {
  const Grid g = grid_for(state);
  const ScalarField v = sample(example_uncoupled().v, g);
  const std::vector<double> radii{0.2, 0.1, 0.05};
  const double tauV = Thresholds::scaled(g.h).v;
  for (auto _ : state) benchmark::DoNotOptimize(classify_blowup(v, {0.3, 0.0}, radii, tauV));
}
BENCHMARK(BM_ClassifyBlowup)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Porosity(benchmark::State& state) {
  const Grid g = grid_for(state);
  const FreeBoundaryCells fb = extract_fb(positivity_set(sample(example_uncoupled().v, g), Thresholds::scaled(g.h).v));
  const std::vector<double> radii = dyadic_radii(8.0 * g.h, 0.25);
  for (auto _ : state) benchmark::DoNotOptimize(porosity_estimate(fb, radii));
}
BENCHMARK(BM_Porosity)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_BoxDimension(benchmark::State& state) {
  const Grid g = grid_for(state);
  const FreeBoundaryCells fb = extract_fb(positivity_set(sample(example_radial().v, g), Thresholds::scaled(g.h).v));
  const std::vector<double> sizes = dyadic_box_sizes(g.h, 6);
  for (auto _ : state) benchmark::DoNotOptimize(box_dimension(fb, sizes));
}
BENCHMARK(BM_BoxDimension)->Arg(256);

}  // namespace
BENCHMARK_MAIN();
