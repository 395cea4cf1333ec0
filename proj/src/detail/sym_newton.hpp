#pragma once

// Damped Newton iteration for equations R(P) = 0 over symmetric matrices,
// parameterized by the lower triangle of P. Shared by the CEE solver and the
// Riccati polishing steps.

#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace covext::detail {

struct SymNewtonResult {
  Eigen::MatrixXd P;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

inline std::vector<std::pair<int, int>> vech_index(int n) {
  std::vector<std::pair<int, int>> idx;
  idx.reserve(n * (n + 1) / 2);
  for (int j = 0; j < n; ++j) {
    for (int i = j; i < n; ++i) idx.emplace_back(i, j);
  }
  return idx;
}

inline Eigen::VectorXd vech(const Eigen::MatrixXd& M,
                            const std::vector<std::pair<int, int>>& idx) {
  Eigen::VectorXd v(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    v(k) = M(idx[k].first, idx[k].second);
  }
  return v;
}

inline Eigen::MatrixXd unvech(const Eigen::VectorXd& v, int n,
                              const std::vector<std::pair<int, int>>& idx) {
  Eigen::MatrixXd M(n, n);
  for (std::size_t k = 0; k < idx.size(); ++k) {
    M(idx[k].first, idx[k].second) = v(k);
    M(idx[k].second, idx[k].first) = v(k);
  }
  return M;
}

// `residual(P)` returns R(P); `derivative(P, E)` returns dR(P)[E] for
// symmetric E. Steps are halved (Armijo, down to 1e-10) until the trial point
// has h'Ph < 1 and a smaller residual norm.
template <typename Residual, typename Derivative>
SymNewtonResult sym_newton(const Residual& residual,
                           const Derivative& derivative, Eigen::MatrixXd P0,
                           double tol, int max_iter) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  const int n = static_cast<int>(P0.rows());
  const auto idx = vech_index(n);
  const int m = static_cast<int>(idx.size());

  SymNewtonResult out;
  out.P = 0.5 * (P0 + P0.transpose());
  MatrixXd R = residual(out.P);
  out.residual = R.norm();
  if (!std::isfinite(out.residual)) return out;

  for (int it = 0; it < max_iter && out.residual > tol; ++it) {
    MatrixXd jac(m, m);
    for (int k = 0; k < m; ++k) {
      MatrixXd E = MatrixXd::Zero(n, n);
      E(idx[k].first, idx[k].second) = 1.0;
      E(idx[k].second, idx[k].first) = 1.0;
      jac.col(k) = vech(derivative(out.P, E), idx);
    }
    const VectorXd rhs = -vech(R, idx);
    VectorXd step = jac.partialPivLu().solve(rhs);
    if (!step.allFinite()) {
      step = jac.completeOrthogonalDecomposition().solve(rhs);
    }
    if (!step.allFinite()) break;
    const MatrixXd delta = unvech(step, n, idx);

    double alpha = 1.0;
    bool accepted = false;
    while (alpha > 1e-10) {
      const MatrixXd trial = out.P + alpha * delta;
      if (trial(0, 0) < 1.0) {
        MatrixXd trial_R = residual(trial);
        const double trial_norm = trial_R.norm();
        if (std::isfinite(trial_norm) &&
            trial_norm <= (1.0 - 1e-4 * alpha) * out.residual) {
          out.P = trial;
          R = std::move(trial_R);
          out.residual = trial_norm;
          accepted = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    out.iterations = it + 1;
    if (!accepted) break;
  }
  out.converged = out.residual <= tol;
  return out;
}

}  // namespace covext::detail
