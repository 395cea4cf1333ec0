#include "covext/cee.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "covext/errors.hpp"

namespace covext {

using Eigen::MatrixXd;
using Eigen::VectorXd;

CEEProblem make_problem(VectorXd u, MatrixXd U, const MonicPolynomial& sigma,
                        ProblemSource source, Eigen::RowVectorXd dropped_row) {
  const int n = sigma.degree();
  if (u.size() != n || U.rows() != n || U.cols() != n) {
    Throw(ErrorKind::kInvalidInput,
          "CEE problem: dimensions of u, U and sigma disagree");
  }
  if (dropped_row.size() == 0) dropped_row = Eigen::RowVectorXd::Zero(n + 1);
  if (dropped_row.size() != n + 1) {
    Throw(ErrorKind::kInvalidInput, "CEE problem: dropped row has wrong length");
  }
  if (!is_schur(sigma)) {
    Throw(ErrorKind::kInvalidInput, "CEE problem: sigma(z) is not Schur");
  }
  CEEProblem prob;
  prob.sigma = sigma.tail();
  prob.Gamma = companion_matrix(sigma.tail());
  prob.u = std::move(u);
  prob.U = std::move(U);
  prob.dropped_row = std::move(dropped_row);
  prob.source = source;
  return prob;
}

namespace {

MatrixXd stacked(const CEEProblem& prob) {
  const int n = prob.n();
  MatrixXd M(n + 1, n + 1);
  M.row(0) = prob.dropped_row;
  M.block(1, 0, n, 1) = prob.u;
  M.block(1, 1, n, n) = prob.U;
  return M;
}

}  // namespace

MatrixXd interpolation_operator(const CEEProblem& prob) {
  const int m = prob.n() + 1;
  const MatrixXd I = MatrixXd::Identity(m, m);
  return (I - stacked(prob)).partialPivLu().solve(I) - I;
}

CEEProblem scaled_problem(const CEEProblem& prob, double t) {
  const int n = prob.n();
  const int m = n + 1;
  const MatrixXd tT = t * interpolation_operator(prob);
  const MatrixXd M =
      (MatrixXd::Identity(m, m) + tT).partialPivLu().solve(tT);
  CEEProblem out = prob;
  out.dropped_row = M.row(0);
  out.u = M.block(1, 0, n, 1);
  out.U = M.block(1, 1, n, n);
  return out;
}

VectorXd g_of_P(const CEEProblem& prob, const MatrixXd& P) {
  if (prob.n() == 0) return VectorXd(0);
  return prob.u + prob.U * (prob.sigma + prob.Gamma * P.col(0));
}

MatrixXd cee_map(const CEEProblem& prob, const MatrixXd& P) {
  if (prob.n() == 0) return MatrixXd(0, 0);
  // P - P h h' P = P - p p' with p = P h.
  const VectorXd p = P.col(0);
  const MatrixXd inner = P - p * p.transpose();
  const VectorXd g = g_of_P(prob, P);
  return prob.Gamma * inner * prob.Gamma.transpose() + g * g.transpose();
}

double cee_residual(const CEEProblem& prob, const MatrixXd& P) {
  return (P - cee_map(prob, P)).norm();
}

FilterExtraction extract_filter(const CEEProblem& prob, const MatrixXd& P) {
  const int n = prob.n();
  FilterExtraction out;
  if (n == 0) {
    out.a = VectorXd(0);
    out.rho = 1.0;
    out.a_is_schur = true;
    return out;
  }
  const double hPh = P(0, 0);
  if (!(hPh < 1.0)) {
    Throw(ErrorKind::kSolver,
          "extract_filter: h'Ph = " + format_number(hPh) + " >= 1");
  }
  const MatrixXd I = MatrixXd::Identity(n, n);
  out.a = (I - prob.U) * (prob.Gamma * P.col(0) + prob.sigma) - prob.u;
  out.rho = std::sqrt(1.0 - hPh);
  out.a_is_schur = is_schur(MonicPolynomial(out.a));
  return out;
}

int rank_P(const MatrixXd& P, double rank_tol) {
  if (P.size() == 0) return 0;
  Eigen::JacobiSVD<MatrixXd> svd(P);
  const VectorXd& s = svd.singularValues();
  const double threshold = rank_tol * std::max(s(0), 1.0);
  return static_cast<int>((s.array() > threshold).count());
}

std::string_view to_string(SolveMethod method) {
  return method == SolveMethod::kNewton ? "newton" : "fixed-point";
}

SolveMethod parse_method(std::string_view name) {
  if (name == "fixed-point") return SolveMethod::kFixedPoint;
  if (name == "newton") return SolveMethod::kNewton;
  Throw(ErrorKind::kInvalidInput,
        "unknown solver method '" + std::string(name) + "'");
}

CEESolution finalize_solution(const CEEProblem& prob, MatrixXd P,
                              double rank_tol) {
  P = 0.5 * (P + P.transpose()).eval();
  CEESolution sol;
  const FilterExtraction fe = extract_filter(prob, P);
  if (!fe.a_is_schur) {
    Throw(ErrorKind::kSolver, "extracted a(z) is not Schur");
  }
  if (prob.n() > 0) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(P, Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(0) < -1e-8 * std::max(1.0, P.norm())) {
      Throw(ErrorKind::kSolver, "CEE solution is not positive semidefinite");
    }
  }
  sol.a = fe.a;
  sol.rho = fe.rho;
  sol.b = fe.a + 2.0 * g_of_P(prob, P);
  sol.rank = rank_P(P, rank_tol);
  sol.residual = cee_residual(prob, P);
  sol.P = std::move(P);
  return sol;
}

namespace {

struct FixedPointOutcome {
  MatrixXd P;
  MatrixXd last_valid;
  int iterations = 0;
  bool converged = false;
};

FixedPointOutcome fixed_point(const CEEProblem& prob, const SolveOptions& opts) {
  const int n = prob.n();
  FixedPointOutcome out;
  out.P = MatrixXd::Zero(n, n);
  out.last_valid = out.P;
  int invalid_streak = 0;
  double best_step = std::numeric_limits<double>::infinity();
  int best_at = 0;
  for (int it = 1; it <= opts.max_iter; ++it) {
    MatrixXd next = cee_map(prob, out.P);
    next = 0.5 * (next + next.transpose()).eval();
    out.iterations = it;
    if (!next.allFinite()) break;
    if (opts.on_iterate) opts.on_iterate(it, next);
    // ||next - P|| is exactly the residual at the previous iterate.
    const double step = (next - out.P).norm();
    if (step < best_step) {
      best_step = step;
      best_at = it;
    } else if (it - best_at > opts.stall_window) {
      break;
    }
    out.P = std::move(next);
    if (out.P(0, 0) >= 1.0) {
      if (++invalid_streak > opts.divergence_grace) break;
      continue;
    }
    invalid_streak = 0;
    out.last_valid = out.P;
    if (step <= opts.tol && cee_residual(prob, out.P) <= opts.tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

// Newton from `start`; on failure, Newton corrections along T(t) = t T.
CEESolution newton_stage(const CEEProblem& prob, const SolveOptions& opts,
                         const MatrixXd& start, int spent) {
  NewtonResult nr = newton_cee(prob, start, opts.tol, opts.newton_max_iter);
  if (nr.converged) {
    try {
      CEESolution sol = finalize_solution(prob, std::move(nr.P), opts.rank_tol);
      sol.method_used = SolveMethod::kNewton;
      sol.iterations = spent + nr.iterations;
      return sol;
    } catch (const Error&) {
      // Converged to a solution off the valid branch; fall through.
    }
  }
  if (!opts.continuation) {
    Throw(ErrorKind::kSolver, "Newton iteration did not reach the valid "
                              "solution (residual " +
                                  format_number(nr.residual) + ")");
  }
  PathResult path = continuation_cee(prob, opts.tol, opts.newton_max_iter,
                                     opts.min_path_step);
  if (!path.reached_end) {
    Throw(ErrorKind::kSolver,
          "solver failed: fixed point, Newton and path following all "
          "stopped short (path stalled after " +
              std::to_string(path.steps) + " steps)");
  }
  // The path ends on a recomputed copy of the data; polish on the original.
  NewtonResult polish =
      newton_cee(prob, path.P, opts.tol, opts.newton_max_iter);
  if (!polish.converged) {
    Throw(ErrorKind::kSolver, "path end point did not polish (residual " +
                                  format_number(polish.residual) + ")");
  }
  CEESolution sol =
      finalize_solution(prob, std::move(polish.P), opts.rank_tol);
  sol.method_used = SolveMethod::kNewton;
  sol.iterations =
      spent + nr.iterations + path.newton_iterations + polish.iterations;
  sol.path_steps = path.steps;
  return sol;
}

}  // namespace

CEESolution solve_cee(const CEEProblem& prob, const SolveOptions& opts) {
  if (!(opts.tol > 0.0)) Throw(ErrorKind::kInvalidInput, "tol must be > 0");
  const int n = prob.n();
  if (n == 0) return finalize_solution(prob, MatrixXd(0, 0), opts.rank_tol);

  if (opts.method == SolveMethod::kNewton) {
    return newton_stage(prob, opts, MatrixXd::Zero(n, n), 0);
  }

  FixedPointOutcome fp = fixed_point(prob, opts);
  std::string failure = "fixed-point iteration did not converge in " +
                        std::to_string(fp.iterations) + " iterations";
  if (fp.converged) {
    try {
      CEESolution sol = finalize_solution(prob, fp.P, opts.rank_tol);
      sol.method_used = SolveMethod::kFixedPoint;
      sol.fixed_point_converged = true;
      sol.iterations = fp.iterations;
      return sol;
    } catch (const Error& e) {
      failure = std::string("fixed point converged to an invalid solution: ") +
                e.what();
    }
  }
  if (!opts.newton_fallback) Throw(ErrorKind::kSolver, failure);
  return newton_stage(prob, opts, fp.last_valid, fp.iterations);
}

}  // namespace covext
