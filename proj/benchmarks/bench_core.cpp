#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "grushin/abp.hpp"
#include "grushin/barriers.hpp"
#include "grushin/discrete_operator.hpp"
#include "grushin/geometry.hpp"
#include "grushin/harnack_lab.hpp"

using namespace grushin;

static void BM_QuasiDistance(benchmark::State& state) {
  double x1 = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(quasi_distance({x1, 0.7}, {1.1, -0.2}));
    x1 += 1e-9;
  }
}
BENCHMARK(BM_QuasiDistance);

static void BM_BallVolume(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(ball_volume({0.8, 0.0}, 1.0));
}
BENCHMARK(BM_BallVolume);

static void BM_Lemma41Barrier(benchmark::State& state) {
  const Lemma41Barrier phi({1.2, 0}, 1.0, -4);
  const auto samples = log_radial_samples({1.2, 0}, 1e-3, 10, 1024, 3);
  for (auto _ : state) {
    for (const Point& x : samples) benchmark::DoNotOptimize(phi(x));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(samples.size()));
}
BENCHMARK(BM_Lemma41Barrier);

static void BM_DirichletSolve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Grid g(-1, 1, -1, 1, n, n);
  const GridFunction rhs = GridFunction::sample(g, [](Point x) { return x.x1 * x.x1; });
  const GridFunction data(g, 0.0);
  const CoefficientField field = make_field(FieldKind::Rotating, FieldParams{0.5, 1.0}, 1);
  for (auto _ : state) benchmark::DoNotOptimize(solve_dirichlet(field, data, rhs));
}
BENCHMARK(BM_DirichletSolve)->Arg(33)->Arg(65)->Arg(129)->Unit(benchmark::kMillisecond);

static void BM_ConvexEnvelope(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Grid g(-1, 1, -1, 1, n, n);
  std::vector<double> f(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Point x = g.node(k);
    f[k] = std::sin(5 * x.x1) * std::cos(3 * x.x2) + x.x1 * x.x1;
  }
  for (auto _ : state) benchmark::DoNotOptimize(lower_convex_envelope(g, f));
}
BENCHMARK(BM_ConvexEnvelope)->Arg(33)->Arg(65)->Arg(129)->Unit(benchmark::kMillisecond);

static void BM_HarnackExperiment(benchmark::State& state) {
  lab::ExperimentConfig cfg;
  cfg.experiment = lab::Experiment::Harnack;
  cfg.grid_n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(lab::run_experiment(cfg));
}
BENCHMARK(BM_HarnackExperiment)->Arg(65)->Arg(97)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
