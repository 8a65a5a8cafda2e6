#include <benchmark/benchmark.h>

#include "bubbly/bubble_solver.hpp"
#include "bubbly/coefficients.hpp"
#include "bubbly/ls_solver.hpp"
#include "bubbly/placement.hpp"

using namespace bubbly;

namespace {

PointSource source() {
  PointSource src;
  src.location = {-1.0, 0.5, 0.5};
  src.pulse = {PulseKind::Window, 2.0, 0.0, 1.0};
  src.c0 = 1.0;
  return src;
}

void BM_CouplingStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const BubbleCloud cloud = place_bubbles(partition_domain(Domain::unit_cube(), 1.0 / (n * n * n)),
                                          KField::constant(0.0), 1e-3, make_sphere(1.0));
  const CouplingSystem sys = coupling_matrix(cloud, MediumParams{});
  const double h = std::min(0.01, sys.tau_min);
  const TimeGrid tg{100 * h, h};
  for (auto _ : state) benchmark::DoNotOptimize(solve_coupled(sys, cloud, source(), tg));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(tg.steps()));
  state.counters["M"] = static_cast<double>(sys.M);
}
BENCHMARK(BM_CouplingStep)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_CountingSums(benchmark::State& state) {
  const auto pts = cubic_lattice(static_cast<int>(state.range(0)));
  const std::vector<double> ex{1.0, 2.0, 4.0};
  for (auto _ : state) benchmark::DoNotOptimize(verify_counting(pts, ex));
  state.counters["points"] = static_cast<double>(pts.size());
}
BENCHMARK(BM_CountingSums)->Arg(8)->Arg(16)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_LsStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const EffectiveGrid g = build_grid(Domain::unit_cube(), KField::constant(0.0), 1.0 / n, 0.5, 1.0);
  const TimeGrid tg{1.0, 0.05};
  for (auto _ : state) benchmark::DoNotOptimize(solve_ls_time(g, 0.25, source(), tg));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(tg.steps()));
  state.counters["voxels"] = static_cast<double>(g.size());
}
BENCHMARK(BM_LsStep)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
