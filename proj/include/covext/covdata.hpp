#pragma once

// Covariance data: ergodic estimation, Toeplitz positivity, the (u, U)
// parameters of the covariance extension equation, and Hankel-rank
// (algebraic degree) analysis with the deterministic partial realization.

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "covext/polyalg.hpp"

namespace covext {

/// c_0..c_n normalized so that c_0 = 1. `scale` is the raw c_0.
class CovarianceSequence {
 public:
  CovarianceSequence() = default;

  /// Normalizes by raw(0). Throws kInvalidInput when raw(0) <= 0.
  static CovarianceSequence FromRaw(const Eigen::VectorXd& raw);

  int order() const { return static_cast<int>(c_.size()) - 1; }
  const Eigen::VectorXd& c() const { return c_; }
  double operator[](int k) const { return c_(k); }
  /// c_1..c_n.
  Eigen::VectorXd lags() const { return c_.tail(order()); }
  double scale() const { return scale_; }
  Eigen::VectorXd raw() const { return scale_ * c_; }

 private:
  Eigen::VectorXd c_;
  double scale_ = 1.0;
};

enum class Estimator { kBiased, kUnbiased };

/// c_k = 1/(N+1) sum_{t=0}^{N-k} y_{t+k} y_t (biased) or 1/(N+1-k) (unbiased),
/// k = 0..max_lag, where N + 1 = y.size().
CovarianceSequence estimate_covariances(std::span<const double> y, int max_lag,
                                        Estimator estimator = Estimator::kBiased);

/// Symmetric (n+1)x(n+1) Toeplitz matrix of c_0..c_n.
Eigen::MatrixXd toeplitz(const Eigen::VectorXd& c);
double toeplitz_min_eig(const Eigen::VectorXd& c);
inline double toeplitz_min_eig(const CovarianceSequence& c) {
  return toeplitz_min_eig(c.c());
}

/// Given c_0..c_n, the n x n lower-triangular Toeplitz matrix with first
/// column (c_0, ..., c_{n-1}).
Eigen::MatrixXd lower_toeplitz(const Eigen::VectorXd& c);

/// Strictly lower-triangular Toeplitz matrix with first column
/// (0, v_1, ..., v_{n-1}).
Eigen::MatrixXd strictly_lower_toeplitz(const Eigen::VectorXd& v);

struct CovParams {
  Eigen::VectorXd u;
  Eigen::MatrixXd U;
};

/// Series inversion z^n/(z^n + c_1 z^{n-1} + ... + c_n) = 1 - sum u_k z^{-k}.
CovParams build_cov_params(const CovarianceSequence& c);

/// rows x cols Hankel matrix with entries c_{i+j+1} (1-based lags). cols
/// defaults to rows.
Eigen::MatrixXd hankel(const Eigen::VectorXd& c, int rows, int cols = -1);

/// Numerical rank: singular values above rank_tol times the largest.
int numerical_rank(const Eigen::MatrixXd& M, double rank_tol);

struct AlgebraicDegree {
  int degree = 0;
  /// Rank of the k x (n + 1 - k) Hankel block for k = 1..ceil(n/2), the
  /// widest blocks the lags c_1..c_n fill.
  std::vector<int> hankel_ranks;
};

AlgebraicDegree algebraic_degree_report(const CovarianceSequence& c,
                                        double rank_tol = 1e-8);
inline int algebraic_degree(const CovarianceSequence& c,
                            double rank_tol = 1e-8) {
  return algebraic_degree_report(c, rank_tol).degree;
}

struct PartialRealization {
  RationalPR f;
  /// 2-norm condition number of the Hankel system (1 when d = 0).
  double condition = 1.0;
};

/// Deterministic partial realization of degree d = algebraic_degree(c).
/// Matches c_1..c_{min(2d, n)}; carries no positivity guarantee.
PartialRealization partial_realization(const CovarianceSequence& c,
                                       double rank_tol = 1e-8);

}  // namespace covext
