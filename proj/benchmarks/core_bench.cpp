#include "gpbayes/bayes.hpp"
#include "gpbayes/darcy.hpp"
#include "gpbayes/design.hpp"
#include "gpbayes/gp.hpp"
#include "gpbayes/mcmc.hpp"
#include "gpbayes/metrics.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace gpbayes;

namespace {

Design uniform_design(std::size_t n, int d, std::uint64_t seed) {
  const Box box(Eigen::VectorXd::Zero(d), Eigen::VectorXd::Ones(d));
  return sample_design(DesignMeasure::uniform(box), n, seed);
}

Observations values(const Design& design) {
  Observations y(static_cast<Eigen::Index>(design.size()));
  for (std::size_t i = 0; i < design.size(); ++i) y[static_cast<Eigen::Index>(i)] = std::sin(3.0 * design[i].sum());
  return y;
}

void BM_GPFit(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Design design = uniform_design(n, 2, 1);
  const Observations y = values(design);
  const GPPrior prior{{}, KernelSpec(KernelFamily::Matern52, 0.3, 1.0)};
  for (auto _ : state) benchmark::DoNotOptimize(GPPosterior::fit(prior, design, y));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GPFit)->RangeMultiplier(2)->Range(16, 512)->Complexity();

void BM_GPPredict(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Design design = uniform_design(n, 2, 2);
  const auto gp = GPPosterior::fit(GPPrior{{}, KernelSpec(KernelFamily::Matern52, 0.3, 1.0)}, design, values(design));
  const Point u = point2(0.31, 0.72);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gp.predict_mean(u));
    benchmark::DoNotOptimize(gp.predict_var(u));
  }
}
BENCHMARK(BM_GPPredict)->RangeMultiplier(4)->Range(16, 1024);

void BM_DarcySolve(benchmark::State& state) {
  DarcyModel m;
  m.breakpoints = {0.5};
  m.observation_points = {0.25, 0.5, 0.75};
  m.cells = static_cast<std::size_t>(state.range(0));
  Eigen::VectorXd k(2);
  k << 1.0, 2.0;
  for (auto _ : state) benchmark::DoNotOptimize(solve_darcy(m, k));
}
BENCHMARK(BM_DarcySolve)->RangeMultiplier(4)->Range(64, 4096);

void BM_FillDistance2D(benchmark::State& state) {
  const Design design = uniform_design(static_cast<std::size_t>(state.range(0)), 2, 3);
  const Box box(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2));
  for (auto _ : state) benchmark::DoNotOptimize(fill_distance(design, box, 256));
}
BENCHMARK(BM_FillDistance2D)->RangeMultiplier(4)->Range(16, 1024);

void BM_MetropolisHastings(benchmark::State& state) {
  const LogDensity target = [](const Point& u) { return -0.5 * u.squaredNorm(); };
  const Proposal proposal = random_walk_proposal(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(metropolis_hastings(target, proposal, point2(0.0, 0.0), 10000, 4));
}
BENCHMARK(BM_MetropolisHastings);

void BM_DesignSquaredError(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Design design = sample_design(DesignMeasure::gaussian1(1.0, 1.0), n, 5);
  const WeightSpec weight{[](const Point& u) { return std::exp(-0.5 * (u[0] - 1.0) * (u[0] - 1.0)); },
                          gaussian_weight_grid(1.0, 1.0), "N(1,1)"};
  std::vector<double> f_grid(weight.grid.size());
  std::vector<double> w(weight.grid.size());
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    f_grid[i] = weight.grid.nodes[i][0];
    w[i] = weight.grid.weights[i] * weight.density(weight.grid.nodes[i]);
    total += w[i];
  }
  for (auto& x : w) x /= total;
  const GPPrior prior{{}, KernelSpec(KernelFamily::SquaredExponential, 1.0, 1.0)};
  const auto f = [](const Point& u) { return u[0]; };
  for (auto _ : state) benchmark::DoNotOptimize(design_squared_error(prior, design, f, weight, f_grid, w));
}
BENCHMARK(BM_DesignSquaredError)->Arg(4)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
