#pragma once

// Nevanlinna-Pick interpolation with a degree constraint, solved through the
// covariance extension equation by replacing (u, U) with parameters built
// from the Vandermonde matrix of the nodes.

#include <string>

#include <Eigen/Dense>

#include "covext/cee.hpp"

namespace covext {

/// Distinct nodes outside the closed unit disc, values in the open right
/// half-plane, closed under conjugation.
struct InterpolationData {
  Eigen::VectorXcd nodes;
  Eigen::VectorXcd values;

  int n() const { return static_cast<int>(nodes.size()) - 1; }
};

/// Throws kInvalidInput describing the first violated condition.
void validate(const InterpolationData& data);

/// Row k is (z_k^n, z_k^{n-1}, ..., 1).
Eigen::MatrixXcd build_vandermonde(const Eigen::VectorXcd& nodes);

/// kCorrected: T = (1/2)(2 V^{-1} C V - I), consistent with f = b/(2a).
/// kPaper: T = (1/2)((1/2) V^{-1} C V - I), i.e. b(z_k) = c_k a(z_k) / 2.
enum class TFactor { kCorrected, kPaper };

struct NPParams {
  Eigen::MatrixXd T;
  Eigen::VectorXd u;
  Eigen::MatrixXd U;
  /// First row of (I + T)^{-1} T; discarded when forming (u, U).
  Eigen::RowVectorXd first_row;
  double condition = 1.0;
  double imag_residue = 0.0;
};

/// Real T for conjugate-closed data. Throws kInvalidInput when V is singular
/// or the imaginary residue exceeds max(1e-12, 16 eps cond(V)) relative to
/// max(1, max|T|).
NPParams build_T(const InterpolationData& data,
                 TFactor factor = TFactor::kCorrected);

/// [u U] = [0 I_n](I + T)^{-1} T. Throws kStructural when I + T has
/// condition number above `max_condition`.
NPParams build_uU_np(NPParams params, double max_condition = 1e12);

/// max_k |b(z_k) / (2 scale a(z_k)) - c_k|.
double interp_residual(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                       const InterpolationData& data, double scale = 1.0);

/// First component of T [1; a] - [0; g], the row dropped by [0 I_n].
/// The g part of [0; g] has no first component, so only a enters.
double first_row_residual(const NPParams& params, const Eigen::VectorXd& a);

struct NPOptions {
  SolveOptions solve;
  TFactor factor = TFactor::kCorrected;
  /// When the unit-scale solve fails or leaves a nonzero dropped row, solve
  /// for the common value scale jointly with P along the value path
  /// (1 - t) / 2 + t c_k. Ignored for TFactor::kPaper.
  bool rescale = true;
  double accept_tol = 1e-8;
  double max_condition = 1e12;
};

struct NPSolution {
  CEESolution cee;
  NPParams params;
  /// The interpolant of the input data is (b / 2a) / scale.
  double scale = 1.0;
  double interp_residual = 0.0;
  double first_row_residual = 0.0;
  bool accepted = false;
  std::string diagnostic;
};

/// Assembles the interpolation-sourced CEE problem and solves it. Structural
/// failures throw, as do solver failures that the scale path cannot recover
/// from. A solution that fails the interpolation check is returned with
/// accepted == false.
NPSolution solve_np(const InterpolationData& data, const MonicPolynomial& sigma,
                    const NPOptions& opts = {});

}  // namespace covext
