#pragma once

// The covariance extension equation
//
//   P = Gamma (P - P h h' P) Gamma' + g(P) g(P)',   g(P) = u + U sigma + U Gamma P h,
//
// with Gamma = J - sigma h' the companion matrix of the spectral-zero
// polynomial sigma(z). Only (u, U) depend on the interpolation data, so the
// same code solves rational covariance extension and Nevanlinna-Pick
// interpolation with rationality constraints.
//
// Both sources are described by an (n+1) x (n+1) operator T with
// [0; g] = T [1; a]. The stacked matrix M = (I + T)^{-1} T has rows
// [dropped_row; u U]; covariance data gives a zero first row. T is recovered
// as (I - M)^{-1} - I, which lets the solver deform the data along
// T(t) = t T from the trivial problem at t = 0.

#include <functional>
#include <string_view>

#include <Eigen/Dense>

#include "covext/covdata.hpp"
#include "covext/polyalg.hpp"

namespace covext {

enum class ProblemSource { kCovariance, kInterpolation };

struct CEEProblem {
  Eigen::VectorXd sigma;
  Eigen::MatrixXd Gamma;
  Eigen::VectorXd u;
  Eigen::MatrixXd U;
  /// First row of (I + T)^{-1} T, length n + 1. Zero for covariance data.
  Eigen::RowVectorXd dropped_row;
  ProblemSource source = ProblemSource::kCovariance;

  int n() const { return static_cast<int>(sigma.size()); }
};

/// Generic assembly. An empty `dropped_row` means zeros. Throws
/// kInvalidInput on dimension mismatch or a non-Schur sigma.
CEEProblem make_problem(Eigen::VectorXd u, Eigen::MatrixXd U,
                        const MonicPolynomial& sigma, ProblemSource source,
                        Eigen::RowVectorXd dropped_row = {});

inline CEEProblem build_problem(const CovParams& params,
                                const MonicPolynomial& sigma) {
  return make_problem(params.u, params.U, sigma, ProblemSource::kCovariance);
}

/// T = (I - M)^{-1} - I with M = [dropped_row; u U].
Eigen::MatrixXd interpolation_operator(const CEEProblem& prob);

/// The same problem with T replaced by t T, 0 <= t <= 1.
CEEProblem scaled_problem(const CEEProblem& prob, double t);

Eigen::VectorXd g_of_P(const CEEProblem& prob, const Eigen::MatrixXd& P);

/// Right-hand side Gamma (P - P h h' P) Gamma' + g(P) g(P)'.
Eigen::MatrixXd cee_map(const CEEProblem& prob, const Eigen::MatrixXd& P);

/// Frobenius norm of P - cee_map(P).
double cee_residual(const CEEProblem& prob, const Eigen::MatrixXd& P);

/// Directional derivative of P - cee_map(P) at P along symmetric E.
Eigen::MatrixXd cee_residual_derivative(const CEEProblem& prob,
                                        const Eigen::MatrixXd& P,
                                        const Eigen::MatrixXd& E);

struct FilterExtraction {
  Eigen::VectorXd a;
  double rho = 1.0;
  bool a_is_schur = false;
};

/// a = (I - U)(Gamma P h + sigma) - u, rho = sqrt(1 - h'Ph).
/// Throws kSolver when h'Ph >= 1.
FilterExtraction extract_filter(const CEEProblem& prob,
                                const Eigen::MatrixXd& P);

/// Singular values above rank_tol * max(largest, 1).
int rank_P(const Eigen::MatrixXd& P, double rank_tol = 1e-8);

enum class SolveMethod { kFixedPoint, kNewton };

std::string_view to_string(SolveMethod method);
SolveMethod parse_method(std::string_view name);

struct SolveOptions {
  double tol = 1e-12;
  int max_iter = 100000;
  SolveMethod method = SolveMethod::kFixedPoint;
  /// Fixed point only: continue with damped Newton from the last valid
  /// iterate when the iteration stalls, diverges or runs out of iterations.
  bool newton_fallback = true;
  int newton_max_iter = 200;
  /// Iterations tolerated with h'Ph >= 1 before declaring divergence.
  int divergence_grace = 10;
  /// Fixed point only: give up after this many iterations without a new
  /// smallest step.
  int stall_window = 2000;
  /// Newton fallback: follow T(t) = t T from t = 0 when Newton from the
  /// last fixed-point iterate fails.
  bool continuation = true;
  double min_path_step = 1e-7;
  double rank_tol = 1e-8;
  /// Called with (iteration, P) after every fixed-point update.
  std::function<void(int, const Eigen::MatrixXd&)> on_iterate;
};

struct CEESolution {
  Eigen::MatrixXd P;
  Eigen::VectorXd a;
  double rho = 1.0;
  /// b = a + 2 g(P).
  Eigen::VectorXd b;
  int rank = 0;
  double residual = 0.0;
  SolveMethod method_used = SolveMethod::kFixedPoint;
  bool fixed_point_converged = false;
  int iterations = 0;
  /// Accepted steps along T(t) = t T; zero when no path was followed.
  int path_steps = 0;

  ShapingFilter filter(const Eigen::VectorXd& sigma) const {
    return {MonicPolynomial(sigma), MonicPolynomial(a), rho};
  }
  RationalPR positive_real() const {
    return {MonicPolynomial(a), MonicPolynomial(b)};
  }
};

/// Solves the CEE for the solution with h'Ph < 1 and Schur a(z).
/// Throws kSolver on non-convergence, on an invalid branch (h'Ph >= 1) and
/// when the extracted a(z) is not Schur.
CEESolution solve_cee(const CEEProblem& prob, const SolveOptions& opts = {});

/// Damped Newton iteration on the residual map over symmetric matrices.
/// Returns the final iterate; `iterations` and `residual` are filled in.
/// Does not throw on non-convergence.
struct NewtonResult {
  Eigen::MatrixXd P;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};
NewtonResult newton_cee(const CEEProblem& prob, Eigen::MatrixXd P0,
                        double tol, int max_iter);

struct PathResult {
  Eigen::MatrixXd P;
  int steps = 0;
  int newton_iterations = 0;
  bool reached_end = false;
};

/// Tracks the valid solution of the problems scaled_problem(prob, t) from
/// P = 0 at t = 0 to t = 1 with a secant predictor and Newton corrector,
/// halving the step whenever the corrector fails or leaves the valid branch.
PathResult continuation_cee(const CEEProblem& prob, double tol,
                            int newton_max_iter, double min_step);

/// Assembles a CEESolution (a, rho, b, rank, residual) from a converged P.
CEESolution finalize_solution(const CEEProblem& prob, Eigen::MatrixXd P,
                              double rank_tol);

}  // namespace covext
