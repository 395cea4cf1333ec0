// Parallel kernels against their serial references.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "covext/cee.hpp"
#include "covext/covdata.hpp"
#include "covext/parallel.hpp"

namespace covext {
namespace {

// Covariances of an AR(2) with poles at 0.6 and -0.3.
CovarianceSequence ar2_sequence(int n) {
  Eigen::VectorXd c(n + 1);
  const double p = 0.6, q = -0.3;
  for (int k = 0; k <= n; ++k) {
    c(k) = (p * std::pow(p, k) / (1 - p * p) / (1 - p * q) -
            q * std::pow(q, k) / (1 - q * q) / (1 - p * q)) / (p - q);
  }
  return CovarianceSequence::FromRaw(c);
}

std::vector<CEEProblem> random_problems(int n, int count) {
  const CovarianceSequence c = ar2_sequence(n);
  const CovParams params = build_cov_params(c);
  SigmaGrid grid;
  grid.max_grid_dim = 0;
  grid.random_draws = count;
  grid.seed = 7;
  std::vector<CEEProblem> out;
  for (const Eigen::VectorXd& s : sigma_grid(n, grid)) {
    out.push_back(build_problem(params, MonicPolynomial(s)));
  }
  return out;
}

void BM_PositiveDegree(benchmark::State& state) {
  const CovarianceSequence c = ar2_sequence(3);
  SigmaGrid grid;
  grid.points_per_axis = static_cast<int>(state.range(1));
  for (auto _ : state) {
    const auto r = state.range(0) ? positive_degree(c, grid, 1e-8)
                                  : positive_degree_reference(c, grid, 1e-8);
    benchmark::DoNotOptimize(r.degree);
  }
  state.SetLabel(state.range(0) ? "openmp" : "serial");
}
BENCHMARK(BM_PositiveDegree)
    ->ArgsProduct({{0, 1}, {5, 9}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

void BM_SolveBatch(benchmark::State& state) {
  const auto problems = random_problems(6, 256);
  for (auto _ : state) {
    const auto r = state.range(0) ? solve_cee_batch(problems)
                                  : solve_cee_batch_reference(problems);
    benchmark::DoNotOptimize(r.data());
  }
  state.SetLabel(state.range(0) ? "openmp" : "serial");
  state.SetItemsProcessed(state.iterations() * problems.size());
}
BENCHMARK(BM_SolveBatch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace
}  // namespace covext

BENCHMARK_MAIN();
