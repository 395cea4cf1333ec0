#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "covext/commands.hpp"

namespace {

void add_solver_flags(CLI::App* cmd, covext::SolverFlags* flags) {
  cmd->add_option("--tol", flags->tol, "CEE residual tolerance");
  cmd->add_option("--max-iter", flags->max_iter, "Fixed-point iteration cap");
  cmd->add_option("--method", flags->method, "Solver method")
      ->check(CLI::IsMember({"fixed-point", "newton"}));
  cmd->add_option("--rank-tol", flags->rank_tol,
                  "Relative singular-value threshold for ranks");
  cmd->add_option("--samples", flags->samples,
                  "Grid size of the positive-realness check");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rational covariance extension and Nevanlinna-Pick "
               "interpolation via the covariance extension equation"};
  app.require_subcommand(1);
  int code = 0;

  covext::ExtendArgs extend;
  auto* extend_cmd =
      app.add_subcommand("extend", "Solve a covariance extension problem");
  extend_cmd->add_option("problem", extend.problem, "Problem JSON")->required();
  add_solver_flags(extend_cmd, &extend.flags);
  extend_cmd->add_option("--out", extend.out, "Solution JSON (default stdout)");
  extend_cmd->callback([&] { code = covext::cmd_extend(extend, std::cerr); });

  covext::NevpickArgs nevpick;
  auto* nevpick_cmd = app.add_subcommand(
      "nevpick", "Solve a Nevanlinna-Pick interpolation problem");
  nevpick_cmd->add_option("problem", nevpick.problem, "Problem JSON")
      ->required();
  add_solver_flags(nevpick_cmd, &nevpick.flags);
  nevpick_cmd->add_flag("--paper-factor", nevpick.paper_factor,
                        "Build T with the literal printed half factor");
  nevpick_cmd->add_option("--out", nevpick.out, "Solution JSON (default stdout)");
  nevpick_cmd->callback([&] { code = covext::cmd_nevpick(nevpick, std::cerr); });

  covext::EstimateArgs estimate;
  auto* estimate_cmd = app.add_subcommand(
      "estimate", "Estimate a covariance problem from a scalar series");
  estimate_cmd->add_option("series", estimate.series, "Series CSV")->required();
  estimate_cmd->add_option("--lags", estimate.lags, "Number of lags n")
      ->required();
  estimate_cmd->add_flag("--unbiased", estimate.unbiased,
                         "Divide by N - k + 1 instead of N + 1");
  estimate_cmd->add_option("--out", estimate.out, "Problem JSON (default stdout)");
  estimate_cmd->callback(
      [&] { code = covext::cmd_estimate(estimate, std::cerr); });

  covext::PosdegArgs posdeg;
  auto* posdeg_cmd = app.add_subcommand(
      "posdeg", "Report the algebraic degree and a positive-degree bound");
  posdeg_cmd->add_option("problem", posdeg.problem, "Problem JSON")->required();
  add_solver_flags(posdeg_cmd, &posdeg.flags);
  posdeg_cmd->add_option("--grid", posdeg.grid,
                         "Grid points per reflection-coefficient axis");
  posdeg_cmd->add_option("--draws", posdeg.draws,
                         "Random sigma draws when n exceeds the grid dimension");
  posdeg_cmd->add_option("--seed", posdeg.seed, "Seed for random sigma draws");
  posdeg_cmd->add_option("--out", posdeg.out, "Report JSON (default stdout)");
  posdeg_cmd->callback([&] { code = covext::cmd_posdeg(posdeg, std::cerr); });

  covext::VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand(
      "verify", "Re-check a solution against its problem without solving");
  verify_cmd->add_option("solution", verify.solution, "Solution JSON")
      ->required();
  verify_cmd->add_option("problem", verify.problem, "Problem JSON")->required();
  verify_cmd->add_option("--tol", verify.tol, "Override the residual tolerance");
  verify_cmd->add_option("--out", verify.out, "Report JSON (default stdout)");
  verify_cmd->callback([&] { code = covext::cmd_verify(verify, std::cerr); });

  covext::SpectrumArgs spectrum;
  auto* spectrum_cmd = app.add_subcommand(
      "spectrum", "Sample the spectral density of a solution on [0, pi]");
  spectrum_cmd->add_option("solution", spectrum.solution, "Solution JSON")
      ->required();
  spectrum_cmd->add_option("--samples", spectrum.samples, "Number of rows")
      ->capture_default_str();
  spectrum_cmd->add_option("--out", spectrum.out, "CSV path (default stdout)");
  spectrum_cmd->callback(
      [&] { code = covext::cmd_spectrum(spectrum, std::cerr); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int status = app.exit(e);
    // Malformed command lines are bad input, same as malformed files.
    return status == 0 ? 0 : 2;
  }
  return code;
}
