#include "covext/realization.hpp"

#include <cmath>
#include <algorithm>
#include <limits>
#include <optional>
#include <string>

#include "covext/cee.hpp"
#include "covext/errors.hpp"
#include "covext/polyalg.hpp"
#include "detail/sym_newton.hpp"

namespace covext {

using Eigen::MatrixXd;
using Eigen::VectorXd;

CompanionRealization companion_realization(const VectorXd& a,
                                           const VectorXd& g) {
  if (a.size() != g.size()) {
    Throw(ErrorKind::kInvalidInput, "realization: size of a and g differ");
  }
  return {companion_matrix(a), g};
}

VectorXd g_from_ab(const VectorXd& a, const VectorXd& b) {
  if (a.size() != b.size()) {
    Throw(ErrorKind::kInvalidInput, "g_from_ab: size of a and b differ");
  }
  return 0.5 * (b - a);
}

VectorXd b_from_ag(const VectorXd& a, const VectorXd& g) {
  if (a.size() != g.size()) {
    Throw(ErrorKind::kInvalidInput, "b_from_ag: size of a and g differ");
  }
  return a + 2.0 * g;
}

namespace {

MatrixXd forward_map(const MatrixXd& F, const VectorXd& g, const MatrixXd& P) {
  const VectorXd v = g - F * P.col(0);
  return F * P * F.transpose() + v * v.transpose() / (1.0 - P(0, 0));
}

MatrixXd gamma_map(const MatrixXd& Gamma, const VectorXd& g,
                   const MatrixXd& P) {
  const VectorXd p = P.col(0);
  return Gamma * (P - p * p.transpose()) * Gamma.transpose() + g * g.transpose();
}

// Directional derivatives of P - forward_map(P) and P - gamma_map(P).
MatrixXd forward_derivative(const MatrixXd& F, const VectorXd& g,
                            const MatrixXd& P, const MatrixXd& E) {
  const double r = 1.0 - P(0, 0);
  const VectorXd v = g - F * P.col(0);
  const VectorXd dv = -F * E.col(0);
  return E - F * E * F.transpose() -
         (dv * v.transpose() + v * dv.transpose()) / r -
         v * v.transpose() * (E(0, 0) / (r * r));
}

MatrixXd gamma_derivative(const MatrixXd& Gamma, const MatrixXd& P,
                          const MatrixXd& E) {
  const VectorXd p = P.col(0);
  const VectorXd e = E.col(0);
  return E - Gamma * (E - e * p.transpose() - p * e.transpose()) *
                 Gamma.transpose();
}

// Newton takes over once the fixed-point step is this small.
constexpr double kHandoffStep = 1e-10;

struct IterationOutcome {
  MatrixXd P;
  int iterations = 0;
  bool valid = true;
};

// P <- (1 - omega) P + omega map(P) from 0 until the step drops below tol or
// the budget runs out. `valid` is false when an iterate is not finite or
// leaves h'Ph < 1.
template <typename Map>
IterationOutcome iterate_from_zero(int n, const Map& map, double omega,
                                   const RiccatiOptions& opts) {
  IterationOutcome out;
  out.P = MatrixXd::Zero(n, n);
  for (int it = 1; it <= opts.max_iter; ++it) {
    const MatrixXd mapped = map(out.P);
    if (!mapped.allFinite()) {
      out.valid = false;
      return out;
    }
    const double step = (mapped - out.P).norm();
    out.P = (1.0 - omega) * out.P +
            omega * 0.5 * (mapped + mapped.transpose());
    out.iterations = it;
    if (!(out.P(0, 0) < 1.0)) {
      out.valid = false;
      return out;
    }
    if (opts.on_iterate) opts.on_iterate(it, out.P);
    if (step <= std::max(opts.tol, kHandoffStep)) break;
  }
  return out;
}

// Newton polish of a fixed-point end state. Slow contraction leaves an error
// of order step / (1 - rate), well above the step itself.
template <typename Map, typename Derivative>
std::optional<RiccatiSolution> polish(const IterationOutcome& fp,
                                      const Map& map,
                                      const Derivative& derivative,
                                      const RiccatiOptions& opts) {
  if (!fp.valid) return std::nullopt;
  const detail::SymNewtonResult nr = detail::sym_newton(
      [&](const MatrixXd& P) { return MatrixXd(P - map(P)); }, derivative,
      fp.P, opts.tol, 50);
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() *
                       std::max(1.0, nr.P.norm()) * nr.P.rows();
  if (!nr.converged && !(nr.residual <= floor)) return std::nullopt;
  return RiccatiSolution{nr.P, nr.residual, fp.iterations + nr.iterations};
}

}  // namespace

double are_residual(const VectorXd& a, const VectorXd& g, const MatrixXd& P) {
  if (a.size() == 0) return 0.0;
  return (P - forward_map(companion_matrix(a), g, P)).norm();
}

RiccatiSolution solve_are_minimal(const VectorXd& a, const VectorXd& g,
                                  const RiccatiOptions& opts) {
  if (a.size() != g.size()) {
    Throw(ErrorKind::kInvalidInput, "solve_are_minimal: size of a and g differ");
  }
  if (!is_schur(MonicPolynomial(a))) {
    Throw(ErrorKind::kInvalidInput, "solve_are_minimal: a(z) is not Schur");
  }
  const int n = static_cast<int>(a.size());
  if (n == 0) return {};
  const MatrixXd F = companion_matrix(a);
  auto map = [&](const MatrixXd& P) { return forward_map(F, g, P); };
  const IterationOutcome fp = iterate_from_zero(n, map, 1.0, opts);
  if (!fp.valid) {
    Throw(ErrorKind::kSolver, "forward Riccati: iterate left h'Ph < 1");
  }
  const auto sol = polish(
      fp, map,
      [&](const MatrixXd& P, const MatrixXd& E) {
        return forward_derivative(F, g, P, E);
      },
      opts);
  if (!sol) {
    Throw(ErrorKind::kSolver,
          "forward Riccati: no convergence after " +
              std::to_string(fp.iterations) + " iterations");
  }
  return *sol;
}

double gamma_form_residual(const VectorXd& sigma, const VectorXd& g,
                           const MatrixXd& P) {
  if (sigma.size() == 0) return 0.0;
  return (P - gamma_map(companion_matrix(sigma), g, P)).norm();
}

RiccatiSolution solve_gamma_form(const VectorXd& sigma, const VectorXd& g,
                                 const RiccatiOptions& opts) {
  if (sigma.size() != g.size()) {
    Throw(ErrorKind::kInvalidInput, "solve_gamma_form: size of sigma and g differ");
  }
  const int n = static_cast<int>(sigma.size());
  RiccatiSolution out;
  out.P = MatrixXd::Zero(n, n);
  if (n == 0) return out;
  const MatrixXd Gamma = companion_matrix(sigma);
  const VectorXd& s = sigma;
  auto valid = [&](const MatrixXd& P) {
    return is_schur(MonicPolynomial(VectorXd(Gamma * P.col(0) + s - g)));
  };
  auto map = [&](const MatrixXd& P) { return gamma_map(Gamma, g, P); };
  auto derivative = [&](const MatrixXd& P, const MatrixXd& E) {
    return gamma_derivative(Gamma, P, E);
  };
  for (double omega : {1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125}) {
    const auto sol =
        polish(iterate_from_zero(n, map, omega, opts), map, derivative, opts);
    if (sol && valid(sol->P)) return *sol;
  }
  // With g held fixed the equation is the covariance extension equation with
  // u = g and U = 0, so the generic Newton path solver applies.
  SolveOptions cee_opts;
  cee_opts.tol = opts.tol;
  cee_opts.method = SolveMethod::kNewton;
  const CEEProblem prob =
      make_problem(g, MatrixXd::Zero(n, n), MonicPolynomial(sigma),
                   ProblemSource::kCovariance);
  CEESolution sol = solve_cee(prob, cee_opts);
  out.P = std::move(sol.P);
  out.iterations = sol.iterations;
  out.residual = sol.residual;
  return out;
}

GainPair k_and_rho(const MatrixXd& P, const VectorXd& sigma, const VectorXd& a,
                   const VectorXd& g, double tol) {
  const Eigen::Index n = a.size();
  if (sigma.size() != n || g.size() != n || P.rows() != n || P.cols() != n) {
    Throw(ErrorKind::kInvalidInput, "k_and_rho: dimension mismatch");
  }
  GainPair out;
  if (n == 0) return out;
  if (!(P(0, 0) < 1.0)) {
    Throw(ErrorKind::kSolver, "k_and_rho: h'Ph >= 1");
  }
  out.rho = std::sqrt(1.0 - P(0, 0));
  const MatrixXd F = companion_matrix(a);
  out.k_riccati = (g - F * P.col(0)) / out.rho;
  out.k_zeros = out.rho * (sigma - a);
  out.mismatch = (out.k_riccati - out.k_zeros).cwiseAbs().maxCoeff();
  if (out.mismatch > tol) {
    Throw(ErrorKind::kVerification,
          "k_and_rho: gain formulas disagree by " + format_number(out.mismatch));
  }
  return out;
}

EquivalenceReport verify_riccati_equivalence(const VectorXd& a,
                                             const VectorXd& g,
                                             const VectorXd& sigma, double tol,
                                             const RiccatiOptions& opts) {
  EquivalenceReport out;
  out.P_forward = solve_are_minimal(a, g, opts).P;
  out.P_gamma = solve_gamma_form(sigma, g, opts).P;
  out.difference = (out.P_forward - out.P_gamma).norm();
  out.pass = out.difference <= tol;
  return out;
}

namespace {

std::complex<double> resolvent_form(const MatrixXd& F, const VectorXd& rhs,
                                    std::complex<double> z) {
  const Eigen::Index n = F.rows();
  if (n == 0) return 0.0;
  const Eigen::MatrixXcd A =
      z * Eigen::MatrixXcd::Identity(n, n) - F.cast<std::complex<double>>();
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(A);
  if (lu.rcond() < 1e-13) {
    Throw(ErrorKind::kInvalidInput,
          "resolvent: z is numerically an eigenvalue of F");
  }
  const Eigen::VectorXcd x = lu.solve(rhs.cast<std::complex<double>>());
  return x(0);
}

}  // namespace

std::complex<double> eval_f_realization(const CompanionRealization& real,
                                        std::complex<double> z) {
  return 0.5 + resolvent_form(real.F, real.g, z);
}

std::complex<double> eval_w_realization(const SpectralFactorRealization& real,
                                        std::complex<double> z) {
  return real.rho + resolvent_form(real.F, real.k, z);
}

}  // namespace covext
