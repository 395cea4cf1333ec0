#include "covext/polyalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "covext/errors.hpp"

namespace covext {

using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd MonicPolynomial::full() const {
  VectorXd out(tail_.size() + 1);
  out(0) = 1.0;
  out.tail(tail_.size()) = tail_;
  return out;
}

std::complex<double> MonicPolynomial::operator()(std::complex<double> z) const {
  std::complex<double> acc = 1.0;
  for (Eigen::Index i = 0; i < tail_.size(); ++i) acc = acc * z + tail_(i);
  return acc;
}

double MonicPolynomial::operator()(double x) const {
  double acc = 1.0;
  for (Eigen::Index i = 0; i < tail_.size(); ++i) acc = acc * x + tail_(i);
  return acc;
}

std::complex<double> RationalPR::operator()(std::complex<double> z) const {
  return b(z) / (2.0 * a(z));
}

std::complex<double> ShapingFilter::operator()(std::complex<double> z) const {
  return rho * sigma(z) / a(z);
}

std::optional<VectorXd> reflection_coefficients(const MonicPolynomial& p) {
  const int n = p.degree();
  VectorXd k(n);
  VectorXd t = p.tail();
  for (int m = n; m >= 1; --m) {
    const double km = t(m - 1);
    if (!(std::abs(km) < 1.0)) return std::nullopt;
    k(m - 1) = km;
    const double denom = 1.0 - km * km;
    VectorXd next(m - 1);
    for (int i = 1; i <= m - 1; ++i) {
      next(i - 1) = (t(i - 1) - km * t(m - i - 1)) / denom;
    }
    t = std::move(next);
  }
  return k;
}

bool is_schur(const MonicPolynomial& p) {
  return reflection_coefficients(p).has_value();
}

MonicPolynomial schur_from_reflection(std::span<const double> k) {
  VectorXd t(0);
  for (std::size_t step = 0; step < k.size(); ++step) {
    const int m = static_cast<int>(step) + 1;
    const double km = k[step];
    VectorXd next(m);
    for (int i = 1; i <= m - 1; ++i) {
      next(i - 1) = t(i - 1) + km * t(m - i - 1);
    }
    next(m - 1) = km;
    t = std::move(next);
  }
  return MonicPolynomial(std::move(t));
}

MatrixXd companion_matrix(const VectorXd& tail) {
  const Eigen::Index n = tail.size();
  MatrixXd M = MatrixXd::Zero(n, n);
  if (n == 0) return M;
  M.col(0) = -tail;
  for (Eigen::Index i = 0; i + 1 < n; ++i) M(i, i + 1) = 1.0;
  return M;
}

VectorXd laurent_coeffs(const RationalPR& f, int m) {
  const int n = f.a.degree();
  if (f.b.degree() != n) {
    Throw(ErrorKind::kInvalidInput,
          "laurent_coeffs: deg a != deg b, constant term of f is not 1/2");
  }
  // b(z)/a(z) = B(w)/A(w) with w = 1/z; q = B/A as a power series in w.
  const VectorXd& a = f.a.tail();
  const VectorXd& b = f.b.tail();
  VectorXd q(m + 1);
  q(0) = 1.0;
  for (int k = 1; k <= m; ++k) {
    double acc = (k <= n) ? b(k - 1) : 0.0;
    for (int j = 1; j <= std::min(k, n); ++j) acc -= a(j - 1) * q(k - j);
    q(k) = acc;
  }
  return 0.5 * q.tail(m);
}

VectorXd solve_b_full(const MonicPolynomial& a, const MonicPolynomial& sigma,
                      double rho) {
  const int n = a.degree();
  if (sigma.degree() != n) {
    Throw(ErrorKind::kInvalidInput, "solve_b: deg sigma != deg a");
  }
  if (!(rho > 0.0)) Throw(ErrorKind::kInvalidInput, "solve_b: rho must be > 0");

  const VectorXd alpha = a.full();
  const VectorXd s = sigma.full();
  // Row k matches z^k: sum_i alpha_i b_{i+k} + sum_i b_i alpha_{i+k}.
  MatrixXd M = MatrixXd::Zero(n + 1, n + 1);
  VectorXd rhs(n + 1);
  for (int k = 0; k <= n; ++k) {
    for (int j = 0; j <= n; ++j) {
      if (j - k >= 0) M(k, j) += alpha(j - k);
      if (j + k <= n) M(k, j) += alpha(j + k);
    }
    double ss = 0.0;
    for (int i = 0; i + k <= n; ++i) ss += s(i) * s(i + k);
    rhs(k) = 2.0 * rho * rho * ss;
  }
  Eigen::FullPivLU<MatrixXd> lu(M);
  if (!lu.isInvertible() || lu.rcond() < 1e-14) {
    Throw(ErrorKind::kInvalidInput,
          "solve_b: singular coefficient matrix (a has reciprocal root pairs)");
  }
  return lu.solve(rhs);
}

MonicPolynomial solve_b(const MonicPolynomial& a, const MonicPolynomial& sigma,
                        double rho) {
  VectorXd full = solve_b_full(a, sigma, rho);
  if (std::abs(full(0) - 1.0) > 1e-8) {
    Throw(ErrorKind::kInvalidInput,
          "solve_b: rho inconsistent with c_0 = 1 (leading coefficient " +
              format_number(full(0)) + ")");
  }
  return MonicPolynomial(full.tail(a.degree()) / full(0));
}

SpectralPair spectral_pair(const MonicPolynomial& a,
                           const MonicPolynomial& sigma) {
  // b scales linearly with rho^2; pick rho so the leading coefficient is 1.
  const VectorXd unit = solve_b_full(a, sigma, 1.0);
  if (!(unit(0) > 0.0)) {
    Throw(ErrorKind::kInvalidInput,
          "spectral_pair: nonpositive leading coefficient, a is not Schur");
  }
  SpectralPair out;
  out.rho = 1.0 / std::sqrt(unit(0));
  out.b = MonicPolynomial(unit.tail(a.degree()) / unit(0));
  return out;
}

namespace {

// Coefficient of z^k in x(z) y(1/z) for full descending vectors of equal size.
double cross(const VectorXd& x, const VectorXd& y, int k) {
  const int len = static_cast<int>(x.size());
  double acc = 0.0;
  for (int i = std::max(0, -k); i < len && i + k < len; ++i) {
    acc += x(i) * y(i + k);
  }
  return acc;
}

VectorXd pad_front(const VectorXd& v, Eigen::Index len) {
  VectorXd out = VectorXd::Zero(len);
  out.tail(v.size()) = v;
  return out;
}

}  // namespace

double spectral_identity_residual(const VectorXd& a_full,
                                  const VectorXd& b_full,
                                  const VectorXd& sigma_full, double rho) {
  const Eigen::Index len =
      std::max({a_full.size(), b_full.size(), sigma_full.size()});
  const VectorXd a = pad_front(a_full, len);
  const VectorXd b = pad_front(b_full, len);
  const VectorXd s = pad_front(sigma_full, len);
  const int n = static_cast<int>(len) - 1;
  double worst = 0.0;
  for (int k = -n; k <= n; ++k) {
    const double r =
        cross(a, b, k) + cross(b, a, k) - 2.0 * rho * rho * cross(s, s, k);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

double spectral_identity_residual(const MonicPolynomial& a,
                                  const MonicPolynomial& b,
                                  const MonicPolynomial& sigma, double rho) {
  return spectral_identity_residual(a.full(), b.full(), sigma.full(), rho);
}

double positive_real_min(const RationalPR& f, int samples) {
  if (samples < 1) {
    Throw(ErrorKind::kInvalidInput, "positive_real_min: samples must be >= 1");
  }
  const double scale = f.a.full().lpNorm<1>();
  double lowest = std::numeric_limits<double>::infinity();
  for (int j = 0; j < samples; ++j) {
    const double theta = 2.0 * std::numbers::pi * j / samples;
    const std::complex<double> z = std::polar(1.0, theta);
    const std::complex<double> az = f.a(z);
    if (std::abs(az) <= 1e-12 * scale) {
      Throw(ErrorKind::kInvalidInput,
            "positive_real_min: a(z) vanishes on the unit circle at theta = " +
                format_number(theta));
    }
    lowest = std::min(lowest, (f.b(z) / (2.0 * az)).real());
  }
  return lowest;
}

double spectral_density(const ShapingFilter& w, double theta) {
  const std::complex<double> z = std::polar(1.0, theta);
  return w.rho * w.rho * std::norm(w.sigma(z)) / std::norm(w.a(z));
}

}  // namespace covext
