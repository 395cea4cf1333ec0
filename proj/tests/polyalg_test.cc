#include "covext/polyalg.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "covext/errors.hpp"
#include "corpus.hpp"

namespace covext {
namespace {

using Eigen::VectorXd;

MonicPolynomial Poly(std::initializer_list<double> tail) {
  VectorXd v(tail.size());
  int i = 0;
  for (double x : tail) v(i++) = x;
  return MonicPolynomial(v);
}

// f(z) = (z + 0.5) / (2 (z - 0.5)) = 1/2 + sum_k 0.5^k z^{-k}.
RationalPR GeometricF() { return {Poly({-0.5}), Poly({0.5})}; }

GTEST_TEST(MonicPolynomialTest, Evaluation) {
  const MonicPolynomial p = Poly({-3.0, 2.0});  // (z - 1)(z - 2)
  EXPECT_DOUBLE_EQ(p(1.0), 0.0);
  EXPECT_DOUBLE_EQ(p(0.0), 2.0);
  EXPECT_NEAR(std::abs(p(std::complex<double>(2.0, 0.0))), 0.0, 1e-15);
  EXPECT_EQ(p.full(), (VectorXd(3) << 1, -3, 2).finished());
  EXPECT_EQ(MonicPolynomial::Monomial(0).degree(), 0);
}

GTEST_TEST(SchurTest, ClassifiesRoots) {
  EXPECT_TRUE(is_schur(Poly({-0.5})));
  EXPECT_FALSE(is_schur(Poly({-1.5})));
  EXPECT_FALSE(is_schur(Poly({-1.0})));
  EXPECT_TRUE(is_schur(Poly({0.0, 0.81})));  // roots +-0.9i
  EXPECT_FALSE(is_schur(Poly({0.0, 1.21})));
  EXPECT_TRUE(is_schur(MonicPolynomial::Monomial(0)));
}

GTEST_TEST(SchurTest, AgreesWithCompanionEigenvalues) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coef(-1.5, 1.5);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + trial % 6;
    VectorXd tail(n);
    for (int i = 0; i < n; ++i) tail(i) = coef(rng);
    const double radius =
        companion_matrix(tail).eigenvalues().cwiseAbs().maxCoeff();
    if (std::abs(radius - 1.0) < 1e-6) continue;
    EXPECT_EQ(is_schur(MonicPolynomial(tail)), radius < 1.0) << tail.transpose();
  }
}

GTEST_TEST(SchurTest, ReflectionRoundTrip) {
  std::mt19937_64 rng(5);
  for (int n = 1; n <= 8; ++n) {
    const std::vector<double> k = testing::random_reflections(n, rng);
    const MonicPolynomial p = schur_from_reflection(k);
    ASSERT_TRUE(is_schur(p));
    const auto back = reflection_coefficients(p);
    ASSERT_TRUE(back.has_value());
    for (int i = 0; i < n; ++i) {
      EXPECT_NEAR(std::abs((*back)(i)), std::abs(k[i]), 1e-12);
    }
  }
  EXPECT_FALSE(reflection_coefficients(Poly({-1.5})).has_value());
}

GTEST_TEST(LaurentTest, GeometricSeries) {
  const VectorXd c = laurent_coeffs(GeometricF(), 6);
  for (int k = 1; k <= 6; ++k) EXPECT_NEAR(c(k - 1), std::pow(0.5, k), 1e-15);
}

GTEST_TEST(LaurentTest, MatchesContourIntegral) {
  // c_k = (1/2pi) int f(e^{it}) e^{ikt} dt, approximated by a fine
  // trapezoidal rule (exponentially accurate for analytic periodic data).
  std::mt19937_64 rng(3);
  const testing::ForwardInstance inst = testing::random_forward(4, rng);
  const VectorXd c = laurent_coeffs(inst.f(), 4);
  const int m = 4096;
  for (int k = 1; k <= 4; ++k) {
    std::complex<double> acc = 0.0;
    for (int j = 0; j < m; ++j) {
      const double t = 2.0 * std::numbers::pi * j / m;
      acc += inst.f()(std::polar(1.0, t)) * std::polar(1.0, k * t);
    }
    EXPECT_NEAR(c(k - 1), acc.real() / m, 1e-10);
  }
}

GTEST_TEST(SpectralTest, GeometricCase) {
  EXPECT_NEAR(positive_real_min(GeometricF(), 4096), 1.0 / 6.0, 1e-12);
  // Phi = 2 Re f; w = sqrt(3/4) (z) / (z - 1/2) at z = -1 gives 1/3.
  const ShapingFilter w{Poly({0.0}), Poly({-0.5}), std::sqrt(0.75)};
  EXPECT_NEAR(spectral_density(w, std::numbers::pi), 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(spectral_density(w, 0.0), 3.0, 1e-14);
  EXPECT_NEAR(spectral_identity_residual(Poly({-0.5}), Poly({0.5}), Poly({0.0}),
                                         std::sqrt(0.75)),
              0.0, 1e-15);
}

GTEST_TEST(SpectralTest, SolveBInvertsIdentity) {
  std::mt19937_64 rng(21);
  for (int n = 1; n <= 8; ++n) {
    const testing::ForwardInstance inst = testing::random_forward(n, rng);
    EXPECT_TRUE(is_schur(inst.b));
    EXPECT_GT(inst.rho, 0.0);
    EXPECT_LT(spectral_identity_residual(inst.a, inst.b, inst.sigma, inst.rho),
              1e-12);
    const MonicPolynomial b = solve_b(inst.a, inst.sigma, inst.rho);
    EXPECT_LT((b.tail() - inst.b.tail()).cwiseAbs().maxCoeff(), 1e-10);
    // Phi from the filter equals 2 Re f on the circle.
    const ShapingFilter w{inst.sigma, inst.a, inst.rho};
    for (double theta : {0.0, 0.7, 2.0, std::numbers::pi}) {
      EXPECT_NEAR(spectral_density(w, theta),
                  2.0 * inst.f()(std::polar(1.0, theta)).real(), 1e-10);
    }
  }
}

GTEST_TEST(SpectralTest, RejectsPoleOnGrid) {
  EXPECT_THROW(positive_real_min({Poly({1.0}), Poly({0.5})}, 64), Error);
}

}  // namespace
}  // namespace covext
