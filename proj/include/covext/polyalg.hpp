#pragma once

// Monic real polynomials, Schur stability, Laurent expansion of b/(2a), and
// the spectral-factor relation a b* + b a* = 2 rho^2 sigma sigma*.
//
// Coefficient convention: a monic degree-n polynomial
//   p(z) = z^n + p_1 z^{n-1} + ... + p_n
// is stored by its tail (p_1, ..., p_n). "Full" vectors are descending and
// include the leading coefficient.

#include <complex>
#include <optional>
#include <span>

#include <Eigen/Dense>

namespace covext {

class MonicPolynomial {
 public:
  MonicPolynomial() = default;
  explicit MonicPolynomial(Eigen::VectorXd tail) : tail_(std::move(tail)) {}

  /// z^n, i.e. all tail coefficients zero.
  static MonicPolynomial Monomial(int n) {
    return MonicPolynomial(Eigen::VectorXd::Zero(n));
  }

  int degree() const { return static_cast<int>(tail_.size()); }
  const Eigen::VectorXd& tail() const { return tail_; }

  /// (1, p_1, ..., p_n).
  Eigen::VectorXd full() const;

  std::complex<double> operator()(std::complex<double> z) const;
  double operator()(double x) const;

 private:
  Eigen::VectorXd tail_;
};

/// f(z) = b(z) / (2 a(z)), with f(infinity) = 1/2 by monicity.
struct RationalPR {
  MonicPolynomial a;
  MonicPolynomial b;

  std::complex<double> operator()(std::complex<double> z) const;
};

/// w(z) = rho sigma(z) / a(z).
struct ShapingFilter {
  MonicPolynomial sigma;
  MonicPolynomial a;
  double rho = 1.0;

  std::complex<double> operator()(std::complex<double> z) const;
};

/// True iff every root lies strictly inside the unit disc. Uses the
/// Schur-Cohn step-down recursion on the reflection coefficients.
bool is_schur(const MonicPolynomial& p);

/// Reflection coefficients in step-up order (k_1 first), or nullopt when the
/// step-down recursion meets some |k| >= 1.
std::optional<Eigen::VectorXd> reflection_coefficients(const MonicPolynomial& p);

/// Step-up (Levinson) recursion. Every |k_i| < 1 yields a Schur polynomial.
MonicPolynomial schur_from_reflection(std::span<const double> k);

/// Companion matrix J - p h' where J is the upward shift: first column -p,
/// ones on the superdiagonal. Its characteristic polynomial is p(z).
Eigen::MatrixXd companion_matrix(const Eigen::VectorXd& tail);

/// Coefficients c_1..c_m of f(z) = 1/2 + c_1 z^{-1} + c_2 z^{-2} + ...
/// Requires deg a == deg b (otherwise the constant term is not 1/2).
Eigen::VectorXd laurent_coeffs(const RationalPR& f, int m);

/// Solves the (n+1)x(n+1) linear system obtained by matching the
/// coefficients of z^0..z^n in a(z)b(1/z) + b(z)a(1/z) = 2 rho^2
/// sigma(z)sigma(1/z). Returns the full (not necessarily monic) b.
Eigen::VectorXd solve_b_full(const MonicPolynomial& a,
                             const MonicPolynomial& sigma, double rho);

/// As solve_b_full, but requires the solution to be monic, which happens
/// exactly when rho is the value consistent with c_0 = 1.
MonicPolynomial solve_b(const MonicPolynomial& a, const MonicPolynomial& sigma,
                        double rho);

/// Given Schur a and sigma, returns the unique (b monic, rho > 0) pair with
/// a b* + b a* = 2 rho^2 sigma sigma*. This is the forward map from a
/// shaping filter to its positive-real part normalized to c_0 = 1.
struct SpectralPair {
  MonicPolynomial b;
  double rho = 1.0;
};
SpectralPair spectral_pair(const MonicPolynomial& a,
                           const MonicPolynomial& sigma);

/// Max-abs coefficient of a b* + b a* - 2 rho^2 sigma sigma* over all powers
/// z^{-n}..z^n. Accepts full (descending) coefficient vectors.
double spectral_identity_residual(const Eigen::VectorXd& a_full,
                                  const Eigen::VectorXd& b_full,
                                  const Eigen::VectorXd& sigma_full,
                                  double rho);
double spectral_identity_residual(const MonicPolynomial& a,
                                  const MonicPolynomial& b,
                                  const MonicPolynomial& sigma, double rho);

/// Minimum of Re f(e^{i theta}) over theta_j = 2 pi j / samples.
/// Throws kInvalidInput when a(z) vanishes on the grid.
double positive_real_min(const RationalPR& f, int samples);

/// rho^2 |sigma(e^{i theta})|^2 / |a(e^{i theta})|^2.
double spectral_density(const ShapingFilter& w, double theta);

}  // namespace covext
