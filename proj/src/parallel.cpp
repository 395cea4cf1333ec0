#include "covext/parallel.hpp"

#include <random>

#include "covext/errors.hpp"

namespace covext {

using Eigen::VectorXd;

std::vector<VectorXd> sigma_grid(int n, const SigmaGrid& grid) {
  std::vector<VectorXd> out;
  if (n == 0) {
    out.emplace_back(0);
    return out;
  }
  const double lo = -1.0 + grid.margin;
  const double hi = 1.0 - grid.margin;
  if (!(lo < hi)) Throw(ErrorKind::kInvalidInput, "sigma grid: bad margin");

  std::vector<double> k(n);
  if (n <= grid.max_grid_dim) {
    const int m = grid.points_per_axis;
    if (m < 1) Throw(ErrorKind::kInvalidInput, "sigma grid: no points");
    auto axis = [&](int i) {
      return m == 1 ? 0.0 : lo + (hi - lo) * i / (m - 1);
    };
    std::vector<int> digit(n, 0);
    while (true) {
      for (int j = 0; j < n; ++j) k[j] = axis(digit[j]);
      out.push_back(schur_from_reflection(k).tail());
      int j = n - 1;
      while (j >= 0 && ++digit[j] == m) digit[j--] = 0;
      if (j < 0) break;
    }
  } else {
    if (grid.random_draws < 1) {
      Throw(ErrorKind::kInvalidInput, "sigma grid: no random draws");
    }
    std::mt19937_64 rng(grid.seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    for (int d = 0; d < grid.random_draws; ++d) {
      for (int j = 0; j < n; ++j) k[j] = dist(rng);
      out.push_back(schur_from_reflection(k).tail());
    }
  }
  return out;
}

namespace {

constexpr int kFailed = -1;

int rank_at(const CEEProblem& prob, double rank_tol, const SolveOptions& opts) {
  try {
    return rank_P(solve_cee(prob, opts).P, rank_tol);
  } catch (const Error&) {
    return kFailed;
  }
}

std::vector<CEEProblem> grid_problems(const CovarianceSequence& c,
                                      const SigmaGrid& grid) {
  const CovParams params = build_cov_params(c);
  std::vector<CEEProblem> problems;
  for (VectorXd& s : sigma_grid(c.order(), grid)) {
    problems.push_back(build_problem(params, MonicPolynomial(std::move(s))));
  }
  return problems;
}

PositiveDegreeResult reduce(const std::vector<CEEProblem>& problems,
                            const std::vector<int>& ranks) {
  PositiveDegreeResult out;
  out.degree = -1;
  out.evaluated = static_cast<int>(ranks.size());
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    if (ranks[i] == kFailed) {
      ++out.failures;
      continue;
    }
    if (out.degree < 0 || ranks[i] < out.degree) {
      out.degree = ranks[i];
      out.argmin_sigma = problems[i].sigma;
    }
  }
  if (out.degree < 0) {
    Throw(ErrorKind::kSolver, "positive_degree: every grid point failed");
  }
  return out;
}

}  // namespace

PositiveDegreeResult positive_degree(const CovarianceSequence& c,
                                     const SigmaGrid& grid, double rank_tol,
                                     const SolveOptions& opts) {
  const std::vector<CEEProblem> problems = grid_problems(c, grid);
  const int count = static_cast<int>(problems.size());
  std::vector<int> ranks(count);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < count; ++i) {
    ranks[i] = rank_at(problems[i], rank_tol, opts);
  }
  return reduce(problems, ranks);
}

PositiveDegreeResult positive_degree_reference(const CovarianceSequence& c,
                                               const SigmaGrid& grid,
                                               double rank_tol,
                                               const SolveOptions& opts) {
  const std::vector<CEEProblem> problems = grid_problems(c, grid);
  std::vector<int> ranks;
  ranks.reserve(problems.size());
  for (const CEEProblem& prob : problems) {
    ranks.push_back(rank_at(prob, rank_tol, opts));
  }
  return reduce(problems, ranks);
}

std::vector<std::optional<CEESolution>> solve_cee_batch(
    const std::vector<CEEProblem>& problems, const SolveOptions& opts) {
  const int count = static_cast<int>(problems.size());
  std::vector<std::optional<CEESolution>> out(count);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < count; ++i) {
    try {
      out[i] = solve_cee(problems[i], opts);
    } catch (const Error&) {
      out[i].reset();
    }
  }
  return out;
}

std::vector<std::optional<CEESolution>> solve_cee_batch_reference(
    const std::vector<CEEProblem>& problems, const SolveOptions& opts) {
  std::vector<std::optional<CEESolution>> out;
  out.reserve(problems.size());
  for (const CEEProblem& prob : problems) {
    try {
      out.emplace_back(solve_cee(prob, opts));
    } catch (const Error&) {
      out.emplace_back(std::nullopt);
    }
  }
  return out;
}

}  // namespace covext
