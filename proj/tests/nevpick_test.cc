#include "covext/nevpick.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "covext/errors.hpp"
#include "corpus.hpp"

namespace covext {
namespace {

using Eigen::VectorXcd;
using Eigen::VectorXd;
using cplx = std::complex<double>;

// f = (z + 1/2) / (2 (z - 1/2)) sampled at 2 and 3.
InterpolationData WorkedCase() {
  InterpolationData d;
  d.nodes = (VectorXcd(2) << 2.0, 3.0).finished();
  d.values = (VectorXcd(2) << 5.0 / 6.0, 0.7).finished();
  return d;
}

const MonicPolynomial kSigmaZ((VectorXd(1) << 0.0).finished());

GTEST_TEST(NevpickTest, WorkedCaseCorrectedFactor) {
  const NPSolution s = solve_np(WorkedCase(), kSigmaZ);
  ASSERT_TRUE(s.accepted) << s.diagnostic;
  EXPECT_NEAR(s.cee.a(0), -0.5, 1e-10);
  EXPECT_NEAR(s.cee.b(0), 0.5, 1e-10);
  EXPECT_NEAR(s.cee.rho, std::sqrt(0.75), 1e-10);
  EXPECT_LT(s.interp_residual, 1e-12);
  EXPECT_LT(s.first_row_residual, 1e-12);
  EXPECT_DOUBLE_EQ(s.scale, 1.0);
}

// Regression lock for the literal half factor: it interpolates the wrong
// values and is reported as unaccepted.
GTEST_TEST(NevpickTest, WorkedCasePaperFactorIsLocked) {
  NPOptions opts;
  opts.factor = TFactor::kPaper;
  const NPSolution s = solve_np(WorkedCase(), kSigmaZ, opts);
  EXPECT_FALSE(s.accepted);
  EXPECT_NEAR(s.cee.a(0), -0.4183006535947719, 1e-12);
  EXPECT_NEAR(s.cee.b(0), 0.4183006535947719, 1e-12);
  EXPECT_NEAR(s.cee.rho, 0.9083086277263839, 1e-12);
  EXPECT_NEAR(s.interp_residual, 0.06887052341597744, 1e-12);
  EXPECT_NEAR(s.first_row_residual, 0.3777233115468411, 1e-12);
}

GTEST_TEST(NevpickTest, ConstantHalfGivesConstantF) {
  InterpolationData d;
  d.nodes = (VectorXcd(3) << 1.5, cplx(2, 1), cplx(2, -1)).finished();
  d.values = VectorXcd::Constant(3, 0.5);
  const NPSolution s = solve_np(d, MonicPolynomial::Monomial(2));
  ASSERT_TRUE(s.accepted);
  EXPECT_LT(s.cee.a.cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT(s.cee.b.cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_DOUBLE_EQ(s.cee.rho, 1.0);
}

GTEST_TEST(NevpickTest, ForwardInstancesRecovered) {
  std::mt19937_64 rng(41);
  for (int n = 1; n <= 6; ++n) {
    for (int trial = 0; trial < 8; ++trial) {
      const testing::ForwardInstance inst = testing::random_forward(n, rng);
      const InterpolationData d = testing::sample_interpolant(inst.f(), n, rng);
      const NPSolution s = solve_np(d, inst.sigma);
      ASSERT_TRUE(s.accepted) << s.diagnostic;
      EXPECT_LT(s.interp_residual, 1e-8);
      EXPECT_LT((s.cee.a - inst.a.tail()).cwiseAbs().maxCoeff(), 1e-6);
    }
  }
}

// Values 2 f(z_k) are interpolated by 2f, which is not of the form b/(2a)
// with monic b; the solver finds the scale instead.
GTEST_TEST(NevpickTest, ScaledValuesRecoverScale) {
  std::mt19937_64 rng(42);
  for (double scale : {2.0, 0.3}) {
    const testing::ForwardInstance inst = testing::random_forward(3, rng);
    const InterpolationData d = testing::sample_interpolant(inst.f(), 3, rng, scale);
    const NPSolution s = solve_np(d, inst.sigma);
    ASSERT_TRUE(s.accepted) << s.diagnostic;
    EXPECT_NEAR(s.scale, 1.0 / scale, 1e-8);
    EXPECT_GT(s.cee.path_steps, 0);
    EXPECT_LT((s.cee.a - inst.a.tail()).cwiseAbs().maxCoeff(), 1e-6);
  }
}

GTEST_TEST(NevpickTest, VandermondeRows) {
  const VectorXcd z = (VectorXcd(2) << 2.0, 3.0).finished();
  const Eigen::MatrixXcd V = build_vandermonde(z);
  EXPECT_EQ(V(0, 0), cplx(2.0));
  EXPECT_EQ(V(0, 1), cplx(1.0));
  EXPECT_EQ(V(1, 0), cplx(3.0));
}

GTEST_TEST(NevpickTest, ValidationRejectsBadData) {
  InterpolationData inside = WorkedCase();
  inside.nodes(0) = 0.5;
  EXPECT_THROW(validate(inside), Error);
  InterpolationData left = WorkedCase();
  left.values(1) = -0.1;
  EXPECT_THROW(validate(left), Error);
  InterpolationData repeated = WorkedCase();
  repeated.nodes(1) = 2.0;
  EXPECT_THROW(validate(repeated), Error);
  InterpolationData unpaired;
  unpaired.nodes = (VectorXcd(2) << cplx(2, 1), 3.0).finished();
  unpaired.values = (VectorXcd(2) << 0.7, 0.7).finished();
  EXPECT_THROW(validate(unpaired), Error);
  InterpolationData mismatched = WorkedCase();
  mismatched.values.resize(1);
  EXPECT_THROW(validate(mismatched), Error);
  EXPECT_NO_THROW(validate(WorkedCase()));
}

GTEST_TEST(NevpickTest, SingularOperatorIsStructural) {
  NPParams p;
  p.T = -Eigen::MatrixXd::Identity(2, 2);
  try {
    build_uU_np(p);
    FAIL() << "expected a structural error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kStructural);
  }
}

GTEST_TEST(NevpickTest, ResidualOfExactInterpolant) {
  const VectorXd a = (VectorXd(1) << -0.5).finished();
  const VectorXd b = (VectorXd(1) << 0.5).finished();
  EXPECT_LT(interp_residual(a, b, WorkedCase()), 1e-15);
  EXPECT_NEAR(interp_residual(a, b, WorkedCase(), 2.0), 0.5 * 5.0 / 6.0, 1e-15);
}

}  // namespace
}  // namespace covext
