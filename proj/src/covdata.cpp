#include "covext/covdata.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "covext/errors.hpp"

namespace covext {

using Eigen::MatrixXd;
using Eigen::VectorXd;

CovarianceSequence CovarianceSequence::FromRaw(const VectorXd& raw) {
  if (raw.size() < 1) {
    Throw(ErrorKind::kInvalidInput, "covariance sequence is empty");
  }
  if (!raw.allFinite()) {
    Throw(ErrorKind::kInvalidInput, "covariance sequence has non-finite values");
  }
  if (!(raw(0) > 0.0)) {
    Throw(ErrorKind::kInvalidInput, "c_0 must be positive");
  }
  CovarianceSequence out;
  out.scale_ = raw(0);
  out.c_ = raw / raw(0);
  out.c_(0) = 1.0;
  return out;
}

CovarianceSequence estimate_covariances(std::span<const double> y, int max_lag,
                                        Estimator estimator) {
  const int count = static_cast<int>(y.size());
  if (count < 2) {
    Throw(ErrorKind::kInvalidInput, "record needs at least two observations");
  }
  if (max_lag < 0 || max_lag > count - 1) {
    Throw(ErrorKind::kInvalidInput,
          "max lag must lie in [0, N] with N + 1 = " + std::to_string(count));
  }
  VectorXd raw(max_lag + 1);
  for (int k = 0; k <= max_lag; ++k) {
    double acc = 0.0;
    for (int t = 0; t + k < count; ++t) acc += y[t + k] * y[t];
    const double denom =
        estimator == Estimator::kBiased ? count : static_cast<double>(count - k);
    raw(k) = acc / denom;
  }
  if (!(raw(0) > 0.0)) {
    Throw(ErrorKind::kInvalidInput, "record is identically zero (c_0 = 0)");
  }
  return CovarianceSequence::FromRaw(raw);
}

MatrixXd toeplitz(const VectorXd& c) {
  const Eigen::Index m = c.size();
  MatrixXd T(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) T(i, j) = c(std::abs(i - j));
  }
  return T;
}

double toeplitz_min_eig(const VectorXd& c) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(toeplitz(c),
                                             Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

MatrixXd lower_toeplitz(const VectorXd& c) {
  const Eigen::Index n = c.size() - 1;
  MatrixXd C = MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) C(i, j) = c(i - j);
  }
  return C;
}

MatrixXd strictly_lower_toeplitz(const VectorXd& v) {
  const Eigen::Index n = v.size();
  MatrixXd U = MatrixXd::Zero(n, n);
  for (Eigen::Index i = 1; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) U(i, j) = v(i - j - 1);
  }
  return U;
}

CovParams build_cov_params(const CovarianceSequence& c) {
  const int n = c.order();
  VectorXd u(n);
  // c_k = u_k + sum_{j=1}^{k-1} c_{k-j} u_j
  for (int k = 1; k <= n; ++k) {
    double acc = c[k];
    for (int j = 1; j <= k - 1; ++j) acc -= c[k - j] * u(j - 1);
    u(k - 1) = acc;
  }
  return {u, strictly_lower_toeplitz(u)};
}

MatrixXd hankel(const VectorXd& c, int rows, int cols) {
  if (cols < 0) cols = rows;
  if (rows < 0 || rows + cols - 1 > c.size() - 1) {
    Throw(ErrorKind::kInvalidInput, "hankel: not enough lags");
  }
  MatrixXd H(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) H(i, j) = c(i + j + 1);
  }
  return H;
}

int numerical_rank(const MatrixXd& M, double rank_tol) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<MatrixXd> svd(M);
  const VectorXd& s = svd.singularValues();
  if (s(0) == 0.0) return 0;
  return static_cast<int>((s.array() > rank_tol * s(0)).count());
}

AlgebraicDegree algebraic_degree_report(const CovarianceSequence& c,
                                        double rank_tol) {
  AlgebraicDegree out;
  const int n = c.order();
  const int largest = (n + 1) / 2;
  // An all-zero lag vector has rank 0 regardless of relative tolerance.
  if (n == 0 || c.lags().cwiseAbs().maxCoeff() == 0.0) {
    out.hankel_ranks.assign(largest, 0);
    return out;
  }
  for (int k = 1; k <= largest; ++k) {
    out.hankel_ranks.push_back(
        numerical_rank(hankel(c.c(), k, n + 1 - k), rank_tol));
  }
  out.degree = out.hankel_ranks.empty() ? 0 : out.hankel_ranks.back();
  return out;
}

PartialRealization partial_realization(const CovarianceSequence& c,
                                       double rank_tol) {
  const int d = algebraic_degree(c, rank_tol);
  PartialRealization out;
  if (d == 0) {
    out.f = {MonicPolynomial::Monomial(0), MonicPolynomial::Monomial(0)};
    return out;
  }
  // With odd n the top degree leaves one equation short; the minimum-norm
  // solution of the n - d available equations is used then.
  const int rows = std::min(d, c.order() - d);
  if (rows == 0) {
    // n = 1: no equation constrains a, and a(z) = z is the minimum-norm choice.
    out.f = {MonicPolynomial::Monomial(1),
             MonicPolynomial((VectorXd(1) << 2.0 * c[1]).finished())};
    return out;
  }
  const MatrixXd H = hankel(c.c(), rows, d);
  const VectorXd rhs = -c.c().segment(d + 1, rows);
  Eigen::JacobiSVD<MatrixXd> svd(H, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const VectorXd& s = svd.singularValues();
  const int last = rows - 1;
  out.condition = s(last) > 0.0 ? s(0) / s(last)
                                : std::numeric_limits<double>::infinity();
  if (!(s(last) > rank_tol * s(0))) {
    Throw(ErrorKind::kInvalidInput,
          "partial_realization: Hankel system is singular");
  }
  // Column j of the Hankel block multiplies a_{d-j}.
  const VectorXd a = svd.solve(rhs).reverse();
  // b = 2c + (2C - I) a on the first d lags.
  const MatrixXd C = lower_toeplitz(c.c().head(d + 1));
  const VectorXd b = 2.0 * c.c().segment(1, d) +
                     (2.0 * C - MatrixXd::Identity(d, d)) * a;
  out.f = {MonicPolynomial(a), MonicPolynomial(b)};
  return out;
}

}  // namespace covext
