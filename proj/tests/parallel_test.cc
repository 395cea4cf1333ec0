#include "covext/parallel.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "covext/polyalg.hpp"
#include "corpus.hpp"

namespace covext {
namespace {

using Eigen::VectorXd;

CovarianceSequence Seq(std::initializer_list<double> c) {
  VectorXd v(c.size());
  int i = 0;
  for (double x : c) v(i++) = x;
  return CovarianceSequence::FromRaw(v);
}

GTEST_TEST(SigmaGridTest, ShapeAndStability) {
  SigmaGrid grid;
  grid.points_per_axis = 4;
  const auto pts = sigma_grid(2, grid);
  ASSERT_EQ(pts.size(), 16u);
  for (const VectorXd& s : pts) EXPECT_TRUE(is_schur(MonicPolynomial(s)));
  grid.random_draws = 25;
  const auto draws = sigma_grid(5, grid);
  EXPECT_EQ(draws.size(), 25u);
  EXPECT_EQ(draws, sigma_grid(5, grid));
  grid.seed = 1;
  EXPECT_NE(draws, sigma_grid(5, grid));
  EXPECT_EQ(sigma_grid(0, grid).size(), 1u);
}

GTEST_TEST(PositiveDegreeTest, KnownDegrees) {
  EXPECT_EQ(positive_degree(Seq({1, 0, 0}), {}, 1e-8).degree, 0);
  EXPECT_EQ(positive_degree(Seq({1, 0.5, 0.25}), {}, 1e-8).degree, 1);
  const auto gap = Seq({1, 0.5, 0.6});
  EXPECT_EQ(algebraic_degree(gap), 1);
  const PositiveDegreeResult r = positive_degree(gap, {}, 1e-8);
  EXPECT_EQ(r.degree, 2);
  EXPECT_EQ(r.failures, 0);
  EXPECT_EQ(r.evaluated, 121);
}

GTEST_TEST(PositiveDegreeTest, MatchesSerialReference) {
  std::mt19937_64 rng(51);
  SigmaGrid grid;
  grid.points_per_axis = 5;
  grid.random_draws = 60;
  for (int n = 1; n <= 4; ++n) {
    const testing::ForwardInstance inst = testing::random_forward(n, rng);
    const PositiveDegreeResult par = positive_degree(inst.c, grid, 1e-8);
    const PositiveDegreeResult ser = positive_degree_reference(inst.c, grid, 1e-8);
    EXPECT_EQ(par.degree, ser.degree);
    EXPECT_EQ(par.argmin_sigma, ser.argmin_sigma);
    EXPECT_EQ(par.evaluated, ser.evaluated);
    EXPECT_EQ(par.failures, ser.failures);
    EXPECT_GE(par.degree, algebraic_degree(inst.c));
  }
}

GTEST_TEST(BatchTest, MatchesSerialReference) {
  std::mt19937_64 rng(52);
  std::vector<CEEProblem> problems;
  for (int i = 0; i < 40; ++i) {
    const testing::ForwardInstance inst = testing::random_forward(1 + i % 5, rng);
    problems.push_back(build_problem(build_cov_params(inst.c), inst.sigma));
  }
  const auto par = solve_cee_batch(problems);
  const auto ser = solve_cee_batch_reference(problems);
  ASSERT_EQ(par.size(), problems.size());
  for (size_t i = 0; i < par.size(); ++i) {
    ASSERT_EQ(par[i].has_value(), ser[i].has_value());
    if (par[i]) EXPECT_EQ(par[i]->P, ser[i]->P);
  }
}

}  // namespace
}  // namespace covext
