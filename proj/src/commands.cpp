#include "covext/commands.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "covext/cee.hpp"
#include "covext/covdata.hpp"
#include "covext/errors.hpp"
#include "covext/nevpick.hpp"
#include "covext/parallel.hpp"
#include "covext/polyalg.hpp"

namespace covext {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr int kDefaultSamples = 4096;
// Covariance sequences whose Toeplitz matrix has a smaller eigenvalue are
// rejected as not positive.
constexpr double kPositivityFloor = 1e-12;

template <typename Body>
int guarded(std::ostream& err, const Body& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed document: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::kInvalidInput);
  }
}

struct Effective {
  SolveOptions solve;
  int samples = kDefaultSamples;
};

Effective resolve(const SolverFlags& flags, const FileOptions& file) {
  Effective eff;
  eff.solve.tol = flags.tol.value_or(file.tol.value_or(eff.solve.tol));
  eff.solve.max_iter =
      flags.max_iter.value_or(file.max_iter.value_or(eff.solve.max_iter));
  eff.solve.rank_tol =
      flags.rank_tol.value_or(file.rank_tol.value_or(eff.solve.rank_tol));
  eff.samples = flags.samples.value_or(file.samples.value_or(kDefaultSamples));
  if (const auto m = flags.method ? flags.method : file.method) {
    eff.solve.method = parse_method(*m);
  }
  if (!(eff.solve.tol > 0.0)) Throw(ErrorKind::kInvalidInput, "--tol must be > 0");
  if (eff.solve.max_iter < 1) {
    Throw(ErrorKind::kInvalidInput, "--max-iter must be >= 1");
  }
  if (!(eff.solve.rank_tol > 0.0)) {
    Throw(ErrorKind::kInvalidInput, "--rank-tol must be > 0");
  }
  return eff;
}

ProblemFile load_problem(const std::string& path, ProblemKind expected) {
  ProblemFile problem = parse_problem(read_json(path));
  if (problem.kind != expected) {
    Throw(ErrorKind::kInvalidInput, "'" + path + "' is a " +
                                        to_string(problem.kind) +
                                        " problem; expected " +
                                        to_string(expected));
  }
  return problem;
}

CovarianceSequence positive_sequence(const ProblemFile& problem) {
  const CovarianceSequence c = CovarianceSequence::FromRaw(problem.c);
  const double min_eig = toeplitz_min_eig(c);
  if (!(min_eig > kPositivityFloor)) {
    Throw(ErrorKind::kInvalidInput,
          "covariance sequence is not positive: smallest Toeplitz eigenvalue " +
              format_number(min_eig));
  }
  return c;
}

double spectral_radius(const VectorXd& tail) {
  if (tail.size() == 0) return 0.0;
  return companion_matrix(tail).eigenvalues().cwiseAbs().maxCoeff();
}

Check at_most(std::string name, double value, double tol) {
  return {std::move(name), value, "<=", tol, value <= tol};
}

Check at_least(std::string name, double value, double tol) {
  return {std::move(name), value, ">=", tol, value >= tol};
}

Check below(std::string name, double value, double bound) {
  return {std::move(name), value, "<", bound, value < bound};
}

double max_abs(const VectorXd& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

VectorXd with_leading_one(const VectorXd& tail) {
  VectorXd full(tail.size() + 1);
  full(0) = 1.0;
  full.tail(tail.size()) = tail;
  return full;
}

TFactor factor_of(const Provenance& p) {
  return p.factor == "paper" ? TFactor::kPaper : TFactor::kCorrected;
}

SolutionFile make_solution(ProblemKind kind, const VectorXd& sigma,
                           const CEESolution& cee, const Effective& eff,
                           const std::string& input_hash) {
  SolutionFile sol;
  sol.kind = kind;
  sol.sigma = sigma;
  sol.a = cee.a;
  sol.b = cee.b;
  sol.rho = cee.rho;
  sol.P = cee.P;
  sol.rank = cee.rank;
  sol.residual = cee.residual;
  const RationalPR f = cee.positive_real();
  sol.positive_real_min = positive_real_min(f, eff.samples);
  sol.spectral_identity_residual = spectral_identity_residual(
      f.a, f.b, MonicPolynomial(sigma), cee.rho);
  Provenance& p = sol.provenance;
  p.input_hash = input_hash;
  p.method = std::string(to_string(cee.method_used));
  p.fixed_point_converged = cee.fixed_point_converged;
  p.iterations = cee.iterations;
  p.path_steps = cee.path_steps;
  p.tol = eff.solve.tol;
  p.max_iter = eff.solve.max_iter;
  p.rank_tol = eff.solve.rank_tol;
  p.samples = eff.samples;
  return sol;
}

int finish(SolutionFile& sol, const ProblemFile& problem,
           const std::string& out, std::ostream& err) {
  sol.checks = verify_solution(sol, problem);
  write_json(solution_to_json(sol), out);
  if (sol.all_pass()) return 0;
  for (const Check& c : sol.checks) {
    if (!c.pass) {
      err << "check failed: " << c.name << " = " << c.value << " (required "
          << c.relation << " " << c.tolerance << ")\n";
    }
  }
  return static_cast<int>(ErrorKind::kVerification);
}

}  // namespace

std::vector<Check> verify_solution(const SolutionFile& sol,
                                   const ProblemFile& problem,
                                   const VerifyTolerances& tol) {
  std::vector<Check> checks;
  const int n = static_cast<int>(sol.a.size());
  checks.push_back(at_most("kind_matches_problem",
                           sol.kind == problem.kind ? 0.0 : 1.0, 0.0));
  checks.push_back(at_most("order_matches_problem",
                           std::abs(problem.n() - n), 0.0));
  if (!checks[0].pass || !checks[1].pass) return checks;
  if (problem.sigma) {
    checks.push_back(at_most("sigma_matches_problem",
                             max_abs(sol.sigma - *problem.sigma), 0.0));
  }
  const Provenance& prov = sol.provenance;
  const MonicPolynomial sigma(sol.sigma);
  checks.push_back(below("sigma_spectral_radius", spectral_radius(sol.sigma), 1.0));
  if (!checks.back().pass) return checks;

  // Rebuild the equation from the problem data alone.
  CEEProblem prob;
  std::optional<NPParams> np;
  const double scale = sol.scale.value_or(1.0);
  if (problem.kind == ProblemKind::kCovariance) {
    prob = build_problem(
        build_cov_params(CovarianceSequence::FromRaw(problem.c)), sigma);
  } else {
    InterpolationData scaled = problem.data;
    scaled.values *= scale;
    np = build_uU_np(build_T(scaled, factor_of(prov)));
    prob = make_problem(np->u, np->U, sigma, ProblemSource::kInterpolation,
                        np->first_row);
  }

  const MatrixXd& P = sol.P;
  const double P_scale = std::max(1.0, P.norm());
  checks.push_back(at_most("P_symmetric",
                           n ? (P - P.transpose()).cwiseAbs().maxCoeff() : 0.0,
                           tol.consistency * P_scale));
  const double hPh = n ? P(0, 0) : 0.0;
  checks.push_back(below("hPh", hPh, 1.0));
  double min_eig = 0.0;
  if (n) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(P, Eigen::EigenvaluesOnly);
    min_eig = es.eigenvalues()(0);
  }
  checks.push_back(at_least("P_min_eigenvalue", min_eig, -1e-8 * P_scale));

  const double residual = cee_residual(prob, P);
  checks.push_back(at_most("cee_residual", residual,
                           std::max(tol.residual, prov.tol)));
  checks.push_back(at_most("residual_reproduced",
                           std::abs(residual - sol.residual),
                           tol.round_trip * std::max(1.0, sol.residual)));
  checks.push_back(at_most("rank_reproduced",
                           std::abs(rank_P(P, prov.rank_tol) - sol.rank), 0.0));

  if (hPh < 1.0) {
    const FilterExtraction fe = extract_filter(prob, P);
    checks.push_back(at_most("a_from_P", max_abs(sol.a - fe.a), tol.consistency));
    checks.push_back(
        at_most("rho_from_P", std::abs(sol.rho - fe.rho), tol.consistency));
    checks.push_back(at_most("b_from_P",
                             max_abs(sol.b - (sol.a + 2.0 * g_of_P(prob, P))),
                             tol.consistency));
  }
  checks.push_back(below("a_spectral_radius", spectral_radius(sol.a), 1.0));
  checks.push_back(below("b_spectral_radius", spectral_radius(sol.b), 1.0));

  const MonicPolynomial a(sol.a);
  const MonicPolynomial b(sol.b);
  checks.push_back(at_most("spectral_identity",
                           spectral_identity_residual(a, b, sigma, sol.rho),
                           tol.spectral_identity));
  double solve_b_gap = std::numeric_limits<double>::infinity();
  try {
    solve_b_gap =
        max_abs(solve_b_full(a, sigma, sol.rho) - with_leading_one(sol.b));
  } catch (const Error&) {
  }
  checks.push_back(at_most("b_from_spectral_system", solve_b_gap, 1e-8));

  if (checks.back().pass || std::isfinite(solve_b_gap)) {
    const int samples = std::max(prov.samples, 2 * n + 1);
    double pr_min = -std::numeric_limits<double>::infinity();
    try {
      pr_min = positive_real_min({a, b}, samples);
    } catch (const Error&) {
    }
    checks.push_back(at_least("positive_real_min", pr_min, -tol.positive_real));
  }

  if (problem.kind == ProblemKind::kCovariance) {
    const CovarianceSequence c = CovarianceSequence::FromRaw(problem.c);
    const double match =
        n ? max_abs(laurent_coeffs({a, b}, n) - c.lags()) : 0.0;
    checks.push_back(at_most("covariance_match", match, tol.covariance_match));
  } else {
    const double accept = prov.accept_tol > 0.0 ? prov.accept_tol : tol.interp;
    checks.push_back(at_most("interp_residual",
                             interp_residual(sol.a, sol.b, problem.data, scale),
                             accept));
    checks.push_back(at_most("first_row_residual",
                             std::abs(first_row_residual(*np, sol.a)), accept));
  }
  return checks;
}

std::vector<std::vector<double>> spectrum_rows(const SolutionFile& sol,
                                               int samples) {
  if (samples < 2) {
    Throw(ErrorKind::kInvalidInput, "--samples must be at least 2");
  }
  const ShapingFilter w{MonicPolynomial(sol.sigma), MonicPolynomial(sol.a),
                        sol.rho};
  const RationalPR f{MonicPolynomial(sol.a), MonicPolynomial(sol.b)};
  std::vector<std::vector<double>> rows;
  rows.reserve(samples);
  for (int j = 0; j < samples; ++j) {
    const double theta = std::numbers::pi * j / (samples - 1);
    const double re_f = f(std::polar(1.0, theta)).real();
    rows.push_back({theta, spectral_density(w, theta), re_f});
  }
  return rows;
}

int cmd_extend(const ExtendArgs& args, std::ostream& err) {
  return guarded(err, [&] {
    const ProblemFile problem = load_problem(args.problem, ProblemKind::kCovariance);
    const Effective eff = resolve(args.flags, problem.options);
    const CovarianceSequence c = positive_sequence(problem);
    const VectorXd sigma = problem.sigma_or_default();
    const CEEProblem prob =
        build_problem(build_cov_params(c), MonicPolynomial(sigma));
    const CEESolution cee = solve_cee(prob, eff.solve);
    if (!cee.fixed_point_converged &&
        eff.solve.method == SolveMethod::kFixedPoint) {
      err << "note: fixed-point iteration did not converge; solved by Newton"
          << (cee.path_steps ? " along a data path" : "") << "\n";
    }
    SolutionFile sol = make_solution(ProblemKind::kCovariance, sigma, cee, eff,
                                     content_hash(problem_to_json(problem)));
    sol.c0 = c.scale();
    sol.covariance_match =
        c.order() ? max_abs(laurent_coeffs(cee.positive_real(), c.order()) -
                            c.lags())
                  : 0.0;
    return finish(sol, problem, args.out, err);
  });
}

int cmd_nevpick(const NevpickArgs& args, std::ostream& err) {
  return guarded(err, [&] {
    const ProblemFile problem =
        load_problem(args.problem, ProblemKind::kInterpolation);
    const Effective eff = resolve(args.flags, problem.options);
    NPOptions opts;
    opts.solve = eff.solve;
    opts.factor = args.paper_factor ? TFactor::kPaper : TFactor::kCorrected;
    const VectorXd sigma = problem.sigma_or_default();
    const NPSolution np = solve_np(problem.data, MonicPolynomial(sigma), opts);
    if (!np.accepted) err << "warning: " << np.diagnostic << "\n";
    SolutionFile sol = make_solution(ProblemKind::kInterpolation, sigma, np.cee,
                                     eff, content_hash(problem_to_json(problem)));
    sol.interp_residual = np.interp_residual;
    sol.scale = np.scale;
    sol.first_row_residual = np.first_row_residual;
    sol.provenance.factor = args.paper_factor ? "paper" : "corrected";
    sol.provenance.accept_tol = opts.accept_tol;
    return finish(sol, problem, args.out, err);
  });
}

int cmd_estimate(const EstimateArgs& args, std::ostream& err) {
  return guarded(err, [&] {
    const std::vector<double> y = read_series_csv(args.series);
    const int record = static_cast<int>(y.size()) - 1;
    if (args.lags < 0 || args.lags > record) {
      Throw(ErrorKind::kInvalidInput,
            "--lags must lie in [0, " + std::to_string(record) +
                "] for a record of " + std::to_string(y.size()) + " samples");
    }
    const Estimator est = args.unbiased ? Estimator::kUnbiased : Estimator::kBiased;
    const CovarianceSequence c = estimate_covariances(y, args.lags, est);
    const double min_eig = toeplitz_min_eig(c);

    Json warnings = Json::array();
    if (args.unbiased) {
      warnings.push_back(
          "unbiased estimates need not form a positive sequence");
    }
    if (!(min_eig > kPositivityFloor)) {
      warnings.push_back("Toeplitz matrix is not positive definite (smallest "
                         "eigenvalue " + format_number(min_eig) + ")");
    }
    for (const auto& w : warnings) err << "warning: " << w.get<std::string>() << "\n";

    ProblemFile problem;
    problem.kind = ProblemKind::kCovariance;
    problem.c = c.c();
    Json raw = Json::array();
    for (Eigen::Index k = 0; k < c.c().size(); ++k) raw.push_back(c.raw()(k));
    problem.diagnostics = {{"estimator", args.unbiased ? "unbiased" : "biased"},
                           {"record_length", y.size()},
                           {"raw_c", std::move(raw)},
                           {"c0", c.scale()},
                           {"toeplitz_min_eig", min_eig},
                           {"warnings", std::move(warnings)}};
    write_json(problem_to_json(problem), args.out);
    return 0;
  });
}

int cmd_posdeg(const PosdegArgs& args, std::ostream& err) {
  return guarded(err, [&] {
    const ProblemFile problem = load_problem(args.problem, ProblemKind::kCovariance);
    const Effective eff = resolve(args.flags, problem.options);
    const CovarianceSequence c = positive_sequence(problem);
    SigmaGrid grid;
    grid.points_per_axis = args.grid.value_or(grid.points_per_axis);
    grid.random_draws = args.draws.value_or(grid.random_draws);
    grid.seed = args.seed;
    if (grid.points_per_axis < 1 || grid.random_draws < 1) {
      Throw(ErrorKind::kInvalidInput, "--grid and --draws must be >= 1");
    }
    const AlgebraicDegree alg = algebraic_degree_report(c, eff.solve.rank_tol);
    const PositiveDegreeResult pos =
        positive_degree(c, grid, eff.solve.rank_tol, eff.solve);
    if (pos.failures) {
      err << "warning: " << pos.failures << " of " << pos.evaluated
          << " grid points failed to solve and were skipped\n";
    }
    const bool ordered = pos.degree >= alg.degree;
    Json argmin = Json::array();
    for (Eigen::Index i = 0; i < pos.argmin_sigma.size(); ++i) {
      argmin.push_back(pos.argmin_sigma(i));
    }
    Json report = {
        {"format", "covext-posdeg/1"},
        {"n", c.order()},
        {"algebraic_degree", alg.degree},
        {"hankel_ranks", alg.hankel_ranks},
        {"positive_degree", pos.degree},
        {"argmin_sigma", std::move(argmin)},
        {"evaluated", pos.evaluated},
        {"failures", pos.failures},
        {"ordering_holds", ordered},
        {"grid",
         {{"mode", c.order() <= grid.max_grid_dim ? "grid" : "random"},
          {"points_per_axis", grid.points_per_axis},
          {"margin", grid.margin},
          {"random_draws", grid.random_draws},
          {"seed", grid.seed}}},
        {"rank_tol", eff.solve.rank_tol},
        {"input_hash", content_hash(problem_to_json(problem))}};
    write_json(report, args.out);
    if (!ordered) {
      err << "check failed: positive degree " << pos.degree
          << " is below the algebraic degree " << alg.degree << "\n";
      return static_cast<int>(ErrorKind::kVerification);
    }
    return 0;
  });
}

int cmd_verify(const VerifyArgs& args, std::ostream& err) {
  return guarded(err, [&] {
    const SolutionFile sol = parse_solution(read_json(args.solution));
    const ProblemFile problem = parse_problem(read_json(args.problem));
    VerifyTolerances tol;
    if (args.tol) {
      if (!(*args.tol > 0.0)) Throw(ErrorKind::kInvalidInput, "--tol must be > 0");
      tol.residual = *args.tol;
    }
    SolutionFile checked = sol;
    if (args.tol) checked.provenance.tol = *args.tol;
    const std::vector<Check> checks = verify_solution(checked, problem, tol);
    bool pass = true;
    for (const Check& c : checks) pass = pass && c.pass;
    Json report = {{"format", "covext-verify/1"},
                   {"pass", pass},
                   {"input_hash_matches",
                    sol.provenance.input_hash ==
                        content_hash(problem_to_json(problem))},
                   {"checks", checks_to_json(checks)}};
    write_json(report, args.out);
    if (pass) return 0;
    for (const Check& c : checks) {
      if (!c.pass) {
        err << "check failed: " << c.name << " = " << c.value << " (required "
            << c.relation << " " << c.tolerance << ")\n";
      }
    }
    return static_cast<int>(ErrorKind::kVerification);
  });
}

int cmd_spectrum(const SpectrumArgs& args, std::ostream& err) {
  return guarded(err, [&] {
    const SolutionFile sol = parse_solution(read_json(args.solution));
    write_text(format_csv({"theta", "phi", "re_f"},
                          spectrum_rows(sol, args.samples)),
               args.out);
    return 0;
  });
}

}  // namespace covext
