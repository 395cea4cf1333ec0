#pragma once

// Companion-form realizations of f(z) = 1/2 + h'(zI - F)^{-1} g and of the
// spectral factor w(z) = rho + h'(zI - F)^{-1} k, together with the classical
// forward Riccati equation used as an independent check on CEE solutions.

#include <complex>
#include <functional>

#include <Eigen/Dense>

namespace covext {

struct CompanionRealization {
  Eigen::MatrixXd F;  // J - a h'
  Eigen::VectorXd g;
};

struct SpectralFactorRealization {
  Eigen::MatrixXd F;
  Eigen::VectorXd k;
  double rho = 1.0;
};

CompanionRealization companion_realization(const Eigen::VectorXd& a,
                                           const Eigen::VectorXd& g);

/// g = (b - a) / 2 and its inverse b = a + 2 g.
Eigen::VectorXd g_from_ab(const Eigen::VectorXd& a, const Eigen::VectorXd& b);
Eigen::VectorXd b_from_ag(const Eigen::VectorXd& a, const Eigen::VectorXd& g);

struct RiccatiSolution {
  Eigen::MatrixXd P;
  double residual = 0.0;
  int iterations = 0;
};

struct RiccatiOptions {
  /// Frobenius residual target. The fixed-point stage hands over to Newton
  /// polishing once its step is below max(tol, 1e-10).
  double tol = 1e-14;
  int max_iter = 100000;
  std::function<void(int, const Eigen::MatrixXd&)> on_iterate;
};

/// Residual (Frobenius) of P = F P F' + (g - F P h)(1 - h'Ph)^{-1}(g - F P h)'.
double are_residual(const Eigen::VectorXd& a, const Eigen::VectorXd& g,
                    const Eigen::MatrixXd& P);

/// Minimal solution of the forward Riccati equation above by fixed-point
/// iteration from P = 0, polished by Newton. Throws kSolver on
/// non-convergence or h'Ph >= 1.
RiccatiSolution solve_are_minimal(const Eigen::VectorXd& a,
                                  const Eigen::VectorXd& g,
                                  const RiccatiOptions& opts = {});

/// Residual of P = Gamma (P - P h h' P) Gamma' + g g' with g held fixed.
double gamma_form_residual(const Eigen::VectorXd& sigma,
                           const Eigen::VectorXd& g, const Eigen::MatrixXd& P);

/// Solves the Gamma-form equation above for the solution with h'Ph < 1 and
/// Schur sigma + Gamma P h - g. Relaxed fixed-point iteration from 0 is tried
/// with weights 1, 1/2, ..., 1/32; Newton path following is the last resort.
/// Throws kSolver when everything fails.
RiccatiSolution solve_gamma_form(const Eigen::VectorXd& sigma,
                                 const Eigen::VectorXd& g,
                                 const RiccatiOptions& opts = {});

struct GainPair {
  /// rho^{-1} (g - F P h)
  Eigen::VectorXd k_riccati;
  /// rho (sigma - a)
  Eigen::VectorXd k_zeros;
  double rho = 1.0;
  double mismatch = 0.0;
};

/// Evaluates both expressions for the spectral-factor gain k. Throws
/// kSolver when h'Ph >= 1 and kVerification when they differ by more than
/// `tol` in max norm.
GainPair k_and_rho(const Eigen::MatrixXd& P, const Eigen::VectorXd& sigma,
                   const Eigen::VectorXd& a, const Eigen::VectorXd& g,
                   double tol = 1e-10);

struct EquivalenceReport {
  Eigen::MatrixXd P_forward;
  Eigen::MatrixXd P_gamma;
  double difference = 0.0;
  bool pass = false;
};

/// Solves the F-form and Gamma-form equations independently and compares
/// the minimal solutions in Frobenius norm.
EquivalenceReport verify_riccati_equivalence(const Eigen::VectorXd& a,
                                             const Eigen::VectorXd& g,
                                             const Eigen::VectorXd& sigma,
                                             double tol,
                                             const RiccatiOptions& opts = {});

/// 1/2 + h'(zI - F)^{-1} g by a linear solve. Throws kInvalidInput when z is
/// numerically an eigenvalue of F.
std::complex<double> eval_f_realization(const CompanionRealization& real,
                                        std::complex<double> z);

/// rho + h'(zI - F)^{-1} k.
std::complex<double> eval_w_realization(const SpectralFactorRealization& real,
                                        std::complex<double> z);

}  // namespace covext
