#pragma once

// Data-parallel kernels over independent CEE solves. Each kernel has an
// OpenMP version and a serial reference used by the tests; both reduce
// results in scan order, so their outputs are identical.

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "covext/cee.hpp"
#include "covext/covdata.hpp"

namespace covext {

/// Sampling of Schur sigma through reflection coefficients.
struct SigmaGrid {
  /// Uniform points per axis on [-1 + margin, 1 - margin] when n <= max_grid_dim.
  int points_per_axis = 11;
  double margin = 0.05;
  int max_grid_dim = 3;
  /// Uniform random draws in the same box when n > max_grid_dim.
  int random_draws = 2000;
  std::uint64_t seed = 0;
};

/// sigma tails in scan order (first reflection coefficient varies slowest).
std::vector<Eigen::VectorXd> sigma_grid(int n, const SigmaGrid& grid);

struct PositiveDegreeResult {
  int degree = 0;
  Eigen::VectorXd argmin_sigma;
  int evaluated = 0;
  int failures = 0;
};

PositiveDegreeResult positive_degree(const CovarianceSequence& c,
                                     const SigmaGrid& grid, double rank_tol,
                                     const SolveOptions& opts = {});
PositiveDegreeResult positive_degree_reference(const CovarianceSequence& c,
                                               const SigmaGrid& grid,
                                               double rank_tol,
                                               const SolveOptions& opts = {});

/// One entry per problem; nullopt where solve_cee threw.
std::vector<std::optional<CEESolution>> solve_cee_batch(
    const std::vector<CEEProblem>& problems, const SolveOptions& opts = {});
std::vector<std::optional<CEESolution>> solve_cee_batch_reference(
    const std::vector<CEEProblem>& problems, const SolveOptions& opts = {});

}  // namespace covext
