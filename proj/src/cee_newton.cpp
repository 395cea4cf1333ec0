#include <algorithm>
#include <cmath>
#include <utility>

#include "covext/cee.hpp"
#include "detail/sym_newton.hpp"

namespace covext {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd residual_map(const CEEProblem& prob, const MatrixXd& P) {
  return P - cee_map(prob, P);
}

// Directional derivative of R(P) = P - cee_map(P) along symmetric E:
//   E - Gamma (E - E h h'P - P h h'E) Gamma' - d g' - g d',  d = U Gamma E h.
MatrixXd residual_derivative(const CEEProblem& prob, const MatrixXd& P,
                             const VectorXd& g, const MatrixXd& E) {
  const VectorXd p = P.col(0);
  const VectorXd e = E.col(0);
  const MatrixXd inner = E - e * p.transpose() - p * e.transpose();
  const VectorXd d = prob.U * (prob.Gamma * e);
  return E - prob.Gamma * inner * prob.Gamma.transpose() - d * g.transpose() -
         g * d.transpose();
}

}  // namespace

MatrixXd cee_residual_derivative(const CEEProblem& prob, const MatrixXd& P,
                                 const MatrixXd& E) {
  return residual_derivative(prob, P, g_of_P(prob, P), E);
}

NewtonResult newton_cee(const CEEProblem& prob, MatrixXd P0, double tol,
                        int max_iter) {
  const detail::SymNewtonResult r = detail::sym_newton(
      [&](const MatrixXd& P) { return residual_map(prob, P); },
      [&](const MatrixXd& P, const MatrixXd& E) {
        return residual_derivative(prob, P, g_of_P(prob, P), E);
      },
      std::move(P0), tol, max_iter);
  return {r.P, r.residual, r.iterations, r.converged};
}

namespace {

bool on_valid_branch(const CEEProblem& prob, const MatrixXd& P) {
  if (!P.allFinite() || !(P(0, 0) < 1.0)) return false;
  return extract_filter(prob, P).a_is_schur;
}

}  // namespace

PathResult continuation_cee(const CEEProblem& prob, double tol,
                            int newton_max_iter, double min_step) {
  const int n = prob.n();
  PathResult out;
  out.P = MatrixXd::Zero(n, n);
  if (n == 0) {
    out.reached_end = true;
    return out;
  }
  // The corrector is capped well below the standalone Newton budget: a good
  // predictor converges in a handful of steps, and a failure is cheaper to
  // retry with a shorter step.
  const int corrector_iter = std::min(newton_max_iter, 15);
  double t = 0.0;
  double dt = 0.25;
  double t_prev = 0.0;
  MatrixXd P_prev;
  while (t < 1.0) {
    const double t_next = std::min(1.0, t + dt);
    MatrixXd guess = out.P;
    if (P_prev.size() > 0) {
      guess += (t_next - t) / (t - t_prev) * (out.P - P_prev);
    }
    const CEEProblem stage = scaled_problem(prob, t_next);
    const NewtonResult nr = newton_cee(stage, guess, tol, corrector_iter);
    out.newton_iterations += nr.iterations;
    if (nr.converged && on_valid_branch(stage, nr.P)) {
      t_prev = t;
      P_prev = out.P;
      t = t_next;
      out.P = nr.P;
      ++out.steps;
      dt = std::min(2.0 * dt, 1.0);
    } else {
      dt *= 0.5;
      if (dt < min_step) return out;
    }
  }
  out.reached_end = true;
  return out;
}

}  // namespace covext
