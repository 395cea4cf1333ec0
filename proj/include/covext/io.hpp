#pragma once

// File formats: JSON problem and solution documents, single-column CSV
// series and spectrum tables. Complex numbers are [re, im] pairs.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "covext/nevpick.hpp"

namespace covext {

using Json = nlohmann::ordered_json;

enum class ProblemKind { kCovariance, kInterpolation };

std::string to_string(ProblemKind kind);

/// Solver settings that a problem file may carry. Command-line flags take
/// precedence over these.
struct FileOptions {
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::optional<std::string> method;
  std::optional<double> rank_tol;
  std::optional<int> samples;
};

struct ProblemFile {
  ProblemKind kind = ProblemKind::kCovariance;
  /// Covariance kind: c_0..c_n as given (not normalized).
  Eigen::VectorXd c;
  /// Interpolation kind.
  InterpolationData data;
  /// sigma_1..sigma_n; zeros (sigma(z) = z^n) when absent.
  std::optional<Eigen::VectorXd> sigma;
  FileOptions options;
  /// Free-form diagnostics block written by `estimate`; carried verbatim.
  Json diagnostics;

  int n() const;
  Eigen::VectorXd sigma_or_default() const;
};

/// Checks the document against schemas/problem.schema.json and converts it.
/// Throws kInvalidInput naming the offending field.
ProblemFile parse_problem(const Json& doc);
Json problem_to_json(const ProblemFile& problem);

/// FNV-1a 64-bit hash of the compact serialization, as 16 hex digits.
std::string content_hash(const Json& doc);

/// One verification outcome: pass iff `value relation tolerance`.
struct Check {
  std::string name;
  double value = 0.0;
  std::string relation;
  double tolerance = 0.0;
  bool pass = false;
};

struct Provenance {
  std::string input_hash;
  std::string method;
  bool fixed_point_converged = false;
  int iterations = 0;
  int path_steps = 0;
  double tol = 0.0;
  int max_iter = 0;
  double rank_tol = 0.0;
  int samples = 0;
  /// Interpolation only: "corrected" or "paper".
  std::string factor;
  double accept_tol = 0.0;
};

struct SolutionFile {
  ProblemKind kind = ProblemKind::kCovariance;
  Eigen::VectorXd sigma;
  Eigen::VectorXd a;
  Eigen::VectorXd b;
  double rho = 1.0;
  Eigen::MatrixXd P;
  int rank = 0;
  double residual = 0.0;
  double positive_real_min = 0.0;
  double spectral_identity_residual = 0.0;
  /// Covariance kind.
  std::optional<double> covariance_match;
  std::optional<double> c0;
  /// Interpolation kind.
  std::optional<double> interp_residual;
  std::optional<double> scale;
  std::optional<double> first_row_residual;
  std::vector<Check> checks;
  Provenance provenance;

  bool all_pass() const;
};

Json solution_to_json(const SolutionFile& sol);
/// Checks the document against schemas/solution.schema.json and converts it.
SolutionFile parse_solution(const Json& doc);

Json checks_to_json(const std::vector<Check>& checks);

/// Reads a JSON file. Missing files and syntax errors throw kInvalidInput.
Json read_json(const std::string& path);
/// Writes `doc` indented, followed by a newline. An empty path or "-" means
/// standard output.
void write_json(const Json& doc, const std::string& path);

/// One numeric column, optional single header row, LF or CRLF line ends.
/// Throws kInvalidInput on empty or non-numeric input.
std::vector<double> parse_series_csv(const std::string& text);
std::vector<double> read_series_csv(const std::string& path);

/// Comma-separated table with a header row and LF line endings.
std::string format_csv(const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& rows);
void write_text(const std::string& text, const std::string& path);

}  // namespace covext
