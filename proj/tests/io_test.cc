#include "covext/io.hpp"

#include <gtest/gtest.h>

#include "covext/errors.hpp"

namespace covext {
namespace {

using Eigen::VectorXd;

ErrorKind KindOf(const std::function<void()>& body) {
  try {
    body();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kSolver;
}

GTEST_TEST(ProblemFileTest, ParsesCovariance) {
  const ProblemFile p = parse_problem(Json::parse(
      R"({"kind": "covariance", "c": [2, 1], "sigma": [0.5],
          "options": {"tol": 1e-10, "method": "newton"}})"));
  EXPECT_EQ(p.kind, ProblemKind::kCovariance);
  EXPECT_EQ(p.n(), 1);
  EXPECT_EQ(p.c, (VectorXd(2) << 2, 1).finished());
  EXPECT_EQ(p.sigma_or_default()(0), 0.5);
  EXPECT_EQ(*p.options.tol, 1e-10);
  EXPECT_EQ(*p.options.method, "newton");
  EXPECT_FALSE(p.options.max_iter.has_value());
}

GTEST_TEST(ProblemFileTest, ParsesInterpolation) {
  const ProblemFile p = parse_problem(Json::parse(
      R"({"kind": "interpolation", "nodes": [[2, 0], [1, 1.5], [1, -1.5]],
          "values": [[1, 0], [0.5, 0.25], [0.5, -0.25]]})"));
  EXPECT_EQ(p.n(), 2);
  EXPECT_EQ(p.data.nodes(1), std::complex<double>(1, 1.5));
  EXPECT_EQ(p.sigma_or_default(), VectorXd::Zero(2));
}

GTEST_TEST(ProblemFileTest, RejectsMalformedDocuments) {
  const char* bad[] = {
      R"([1, 2])",
      R"({"c": [1, 0.5]})",
      R"({"kind": "spectrum", "c": [1]})",
      R"({"kind": "covariance", "c": []})",
      R"({"kind": "covariance", "c": [1, "x"]})",
      R"({"kind": "covariance", "c": [1, 0.5], "sigma": [0, 0]})",
      R"({"kind": "covariance", "c": [1, 0.5], "extra": 1})",
      R"({"kind": "covariance", "c": [1, 0.5], "options": {"iters": 3}})",
      R"({"kind": "covariance", "c": [1, 0.5], "options": {"max_iter": 2.5}})",
      R"({"kind": "interpolation", "nodes": [[2, 0]], "values": [[1, 0], [1, 0]]})",
      R"({"kind": "interpolation", "nodes": [[2, 0, 0]], "values": [[1, 0]]})",
      R"({"kind": "interpolation", "nodes": [2], "values": [[1, 0]]})",
  };
  for (const char* text : bad) {
    EXPECT_EQ(KindOf([&] { parse_problem(Json::parse(text)); }),
              ErrorKind::kInvalidInput)
        << text;
  }
}

GTEST_TEST(ProblemFileTest, RoundTripAndHash) {
  const Json doc = Json::parse(
      R"({"kind": "covariance", "c": [1, 0.5, 0.25], "sigma": [0.1, 0.2]})");
  const ProblemFile p = parse_problem(doc);
  const Json again = problem_to_json(p);
  EXPECT_EQ(parse_problem(again).c, p.c);
  EXPECT_EQ(content_hash(again), content_hash(problem_to_json(parse_problem(again))));
  EXPECT_EQ(content_hash(again).size(), 16u);
  ProblemFile other = p;
  other.c(2) = 0.26;
  EXPECT_NE(content_hash(problem_to_json(other)), content_hash(again));
}

SolutionFile Sample() {
  SolutionFile s;
  s.kind = ProblemKind::kCovariance;
  s.sigma = VectorXd::Zero(2);
  s.a = (VectorXd(2) << -0.3, 0.1).finished();
  s.b = (VectorXd(2) << 0.2, 0.05).finished();
  s.rho = 0.9;
  s.P = (Eigen::MatrixXd(2, 2) << 0.1, 0.02, 0.02, 0.05).finished();
  s.rank = 2;
  s.residual = 1e-17;
  s.positive_real_min = 0.2;
  s.spectral_identity_residual = 3e-17;
  s.covariance_match = 1e-16;
  s.c0 = 1.5;
  s.checks = {{"x", 0.1, "<=", 1.0, true}};
  s.provenance.input_hash = "0123456789abcdef";
  s.provenance.method = "newton";
  s.provenance.iterations = 7;
  return s;
}

GTEST_TEST(SolutionFileTest, RoundTripIsExact) {
  const SolutionFile s = Sample();
  const Json doc = solution_to_json(s);
  EXPECT_EQ(doc["P"].size(), 4u);
  EXPECT_EQ(doc["P"][1].get<double>(), 0.02);
  const SolutionFile back = parse_solution(Json::parse(doc.dump()));
  EXPECT_EQ(back.a, s.a);
  EXPECT_EQ(back.P, s.P);
  EXPECT_EQ(back.residual, s.residual);
  EXPECT_EQ(*back.covariance_match, *s.covariance_match);
  EXPECT_EQ(back.provenance.iterations, 7);
  EXPECT_EQ(solution_to_json(back).dump(), doc.dump());
}

GTEST_TEST(SolutionFileTest, RejectsInconsistentArrays) {
  Json doc = solution_to_json(Sample());
  doc["P"].erase(0);
  EXPECT_THROW(parse_solution(doc), Error);
  doc = solution_to_json(Sample());
  doc["b"].push_back(1.0);
  EXPECT_THROW(parse_solution(doc), Error);
  doc = solution_to_json(Sample());
  doc["format"] = "other/1";
  EXPECT_THROW(parse_solution(doc), Error);
}

GTEST_TEST(CsvTest, ParsesSeries) {
  EXPECT_EQ(parse_series_csv("1\n-1\n1\n"), (std::vector<double>{1, -1, 1}));
  EXPECT_EQ(parse_series_csv("y\r\n2.5\r\n3\r\n"), (std::vector<double>{2.5, 3}));
  EXPECT_EQ(parse_series_csv("1e-3\n\n4"), (std::vector<double>{1e-3, 4}));
  EXPECT_THROW(parse_series_csv(""), Error);
  EXPECT_THROW(parse_series_csv("y\n"), Error);
  EXPECT_THROW(parse_series_csv("1,2\n"), Error);
  EXPECT_THROW(parse_series_csv("1\nabc\n"), Error);
  EXPECT_THROW(parse_series_csv("1\nnan\n"), Error);
}

GTEST_TEST(CsvTest, FormatsWithLfAndFullPrecision) {
  const std::string text = format_csv({"x", "y"}, {{0.1, 2.0}, {1.0 / 3.0, -4}});
  EXPECT_EQ(text, "x,y\n0.10000000000000001,2\n0.33333333333333331,-4\n");
}

}  // namespace
}  // namespace covext
