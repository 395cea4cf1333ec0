#pragma once

// The six command-line operations. Each returns the process exit code
// (0 ok, 2 bad data, 3 solver, 4 verification, 5 structural) and writes
// human-readable diagnostics to `err`; machine-readable results go to the
// --out path or standard output.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "covext/io.hpp"

namespace covext {

/// Flags shared by the solving commands. Unset values fall back to the
/// problem file's options, then to the library defaults.
struct SolverFlags {
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::optional<std::string> method;
  std::optional<double> rank_tol;
  std::optional<int> samples;
};

struct ExtendArgs {
  std::string problem;
  SolverFlags flags;
  std::string out;
};

struct NevpickArgs {
  std::string problem;
  SolverFlags flags;
  bool paper_factor = false;
  std::string out;
};

struct EstimateArgs {
  std::string series;
  int lags = 0;
  bool unbiased = false;
  std::string out;
};

struct PosdegArgs {
  std::string problem;
  SolverFlags flags;
  std::optional<int> grid;
  std::optional<int> draws;
  std::uint64_t seed = 0;
  std::string out;
};

struct VerifyArgs {
  std::string solution;
  std::string problem;
  /// Overrides the CEE residual tolerance recorded in the solution.
  std::optional<double> tol;
  std::string out;
};

struct SpectrumArgs {
  std::string solution;
  int samples = 512;
  std::string out;
};

int cmd_extend(const ExtendArgs& args, std::ostream& err);
int cmd_nevpick(const NevpickArgs& args, std::ostream& err);
int cmd_estimate(const EstimateArgs& args, std::ostream& err);
int cmd_posdeg(const PosdegArgs& args, std::ostream& err);
int cmd_verify(const VerifyArgs& args, std::ostream& err);
int cmd_spectrum(const SpectrumArgs& args, std::ostream& err);

/// Tolerances of the verification suite.
struct VerifyTolerances {
  /// CEE residual; the effective bound is max(residual, solver tol).
  double residual = 1e-10;
  double consistency = 1e-10;
  double spectral_identity = 1e-10;
  double positive_real = 1e-10;
  double covariance_match = 1e-8;
  double interp = 1e-8;
  double round_trip = 1e-14;
};

/// Re-evaluates every invariant of `sol` against `problem` without solving.
std::vector<Check> verify_solution(const SolutionFile& sol,
                                   const ProblemFile& problem,
                                   const VerifyTolerances& tol = {});

/// theta_j = pi j / (samples - 1), j = 0..samples-1; columns theta, phi
/// (the spectral density), re_f. Throws kInvalidInput for samples < 2.
std::vector<std::vector<double>> spectrum_rows(const SolutionFile& sol,
                                               int samples);

}  // namespace covext
