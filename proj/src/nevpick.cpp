#include "covext/nevpick.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>
#include <string>

#include "covext/errors.hpp"
#include "detail/sym_newton.hpp"

namespace covext {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using cplx = std::complex<double>;

namespace {
constexpr double kConjugateTol = 1e-12;
}

void validate(const InterpolationData& data) {
  const Eigen::Index m = data.nodes.size();
  if (m < 1) Throw(ErrorKind::kInvalidInput, "interpolation data is empty");
  if (data.values.size() != m) {
    Throw(ErrorKind::kInvalidInput, "nodes and values differ in length");
  }
  if (!data.nodes.allFinite() || !data.values.allFinite()) {
    Throw(ErrorKind::kInvalidInput, "interpolation data is not finite");
  }
  for (Eigen::Index k = 0; k < m; ++k) {
    const std::string at = " (index " + std::to_string(k) + ")";
    if (!(std::abs(data.nodes(k)) > 1.0)) {
      Throw(ErrorKind::kInvalidInput, "node is not outside the unit disc" + at);
    }
    if (!(data.values(k).real() > 0.0)) {
      Throw(ErrorKind::kInvalidInput,
            "value is not in the open right half-plane" + at);
    }
    for (Eigen::Index j = 0; j < k; ++j) {
      if (data.nodes(j) == data.nodes(k)) {
        Throw(ErrorKind::kInvalidInput, "repeated node" + at);
      }
    }
    bool paired = false;
    for (Eigen::Index j = 0; j < m && !paired; ++j) {
      const double zs = std::max(1.0, std::abs(data.nodes(k)));
      const double cs = std::max(1.0, std::abs(data.values(k)));
      paired = std::abs(data.nodes(j) - std::conj(data.nodes(k))) <=
                   kConjugateTol * zs &&
               std::abs(data.values(j) - std::conj(data.values(k))) <=
                   kConjugateTol * cs;
    }
    if (!paired) {
      Throw(ErrorKind::kInvalidInput,
            "data is not closed under conjugation" + at);
    }
  }
}

MatrixXcd build_vandermonde(const VectorXcd& nodes) {
  const Eigen::Index m = nodes.size();
  for (Eigen::Index k = 0; k < m; ++k) {
    for (Eigen::Index j = 0; j < k; ++j) {
      if (nodes(j) == nodes(k)) {
        Throw(ErrorKind::kInvalidInput, "Vandermonde: repeated node");
      }
    }
  }
  MatrixXcd V(m, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    cplx power = 1.0;
    for (Eigen::Index j = m - 1; j >= 0; --j) {
      V(k, j) = power;
      power *= nodes(k);
    }
  }
  return V;
}

NPParams build_T(const InterpolationData& data, TFactor factor) {
  const MatrixXcd V = build_vandermonde(data.nodes);
  const Eigen::Index m = V.rows();
  Eigen::PartialPivLU<MatrixXcd> lu(V);
  const MatrixXcd CV = data.values.asDiagonal() * V;
  const MatrixXcd X = lu.solve(CV);  // V^{-1} C V
  if (!X.allFinite()) {
    Throw(ErrorKind::kInvalidInput, "build_T: Vandermonde matrix is singular");
  }
  const MatrixXcd I = MatrixXcd::Identity(m, m);
  const MatrixXcd T = factor == TFactor::kCorrected
                          ? MatrixXcd(0.5 * (2.0 * X - I))
                          : MatrixXcd(0.5 * (0.5 * X - I));
  NPParams out;
  out.imag_residue = T.imag().cwiseAbs().maxCoeff();
  // Rounding in V^{-1} C V grows with the conditioning of V, so the
  // tolerance does too once it exceeds the nominal 1e-12.
  Eigen::JacobiSVD<MatrixXcd> svd(V);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cond_V = sv(0) / sv(m - 1);
  const double tol = std::max(
      1e-12, 16.0 * std::numeric_limits<double>::epsilon() * cond_V);
  const double scale = std::max(1.0, T.real().cwiseAbs().maxCoeff());
  if (out.imag_residue > tol * scale) {
    Throw(ErrorKind::kInvalidInput,
          "build_T: T has imaginary residue " +
              format_number(out.imag_residue) +
              "; data must be closed under conjugation");
  }
  out.T = T.real();
  return out;
}

NPParams build_uU_np(NPParams params, double max_condition) {
  const Eigen::Index m = params.T.rows();
  const Eigen::Index n = m - 1;
  const MatrixXd IT = MatrixXd::Identity(m, m) + params.T;
  Eigen::JacobiSVD<MatrixXd> svd(IT);
  const VectorXd& s = svd.singularValues();
  params.condition = s(m - 1) > 0.0 ? s(0) / s(m - 1)
                                    : std::numeric_limits<double>::infinity();
  if (!(params.condition <= max_condition)) {
    Throw(ErrorKind::kStructural,
          "I + T is singular or ill-conditioned (condition " +
              format_number(params.condition) + ")");
  }
  const MatrixXd M = IT.fullPivLu().solve(params.T);
  params.first_row = M.row(0);
  params.u = M.block(1, 0, n, 1);
  params.U = M.block(1, 1, n, n);
  return params;
}

double interp_residual(const VectorXd& a, const VectorXd& b,
                       const InterpolationData& data, double scale) {
  const MonicPolynomial pa(a);
  const MonicPolynomial pb(b);
  const double a_scale = pa.full().lpNorm<1>();
  double worst = 0.0;
  for (Eigen::Index k = 0; k < data.nodes.size(); ++k) {
    const cplx az = pa(data.nodes(k));
    if (std::abs(az) <= 1e-14 * a_scale) {
      Throw(ErrorKind::kVerification, "interp_residual: a(z) vanishes at a node");
    }
    const cplx fz = pb(data.nodes(k)) / (2.0 * scale * az);
    worst = std::max(worst, std::abs(fz - data.values(k)));
  }
  return worst;
}

double first_row_residual(const NPParams& params, const VectorXd& a) {
  VectorXd one_a(a.size() + 1);
  one_a(0) = 1.0;
  one_a.tail(a.size()) = a;
  // [0; g] with g = (b - a) / 2 has a zero first entry.
  return params.T.row(0).dot(one_a);
}

namespace {

using detail::unvech;
using detail::vech;
using detail::vech_index;

// The interpolation problem with values scale * v_k and unknown scale.
// Unknowns x = (vech P, log scale); equations are the CEE residual (lower
// triangle) followed by the first row dropped from (I + T)^{-1} T. The
// corrected T is affine in the scale: T = scale X - I / 2, X = V^{-1} C V.
class ScaledSystem {
 public:
  struct Point {
    CEEProblem prob;
    NPParams params;
    MatrixXd P;
    VectorXd value;
    bool admissible = false;
  };

  ScaledSystem(MatrixXd X, const MonicPolynomial& sigma, double max_condition)
      : X_(std::move(X)),
        sigma_(sigma),
        max_condition_(max_condition),
        n_(sigma.degree()),
        idx_(vech_index(n_)) {}

  int unknowns() const { return static_cast<int>(idx_.size()) + 1; }

  Point evaluate(const VectorXd& x) const {
    Point pt;
    const int m = unknowns() - 1;
    pt.P = unvech(x.head(m), n_, idx_);
    const Eigen::Index dim = X_.rows();
    pt.params.T = std::exp(x(m)) * X_ - 0.5 * MatrixXd::Identity(dim, dim);
    try {
      pt.params = build_uU_np(std::move(pt.params), max_condition_);
    } catch (const Error&) {
      return pt;
    }
    pt.prob = make_problem(pt.params.u, pt.params.U, sigma_,
                           ProblemSource::kInterpolation, pt.params.first_row);
    pt.value.resize(m + 1);
    pt.value.head(m) = vech(pt.P - cee_map(pt.prob, pt.P), idx_);
    // a = (I - U)(Gamma P h + sigma) - u, evaluated without the h'Ph < 1
    // guard of extract_filter so that the residual stays defined.
    const VectorXd a =
        (MatrixXd::Identity(n_, n_) - pt.prob.U) *
            (pt.prob.Gamma * pt.P.col(0) + pt.prob.sigma) -
        pt.prob.u;
    pt.value(m) = first_row_residual(pt.params, a);
    pt.admissible = pt.value.allFinite() && pt.P(0, 0) < 1.0 &&
                    is_schur(MonicPolynomial(a));
    return pt;
  }

  MatrixXd jacobian(const VectorXd& x, const Point& at) const {
    const int m = unknowns() - 1;
    MatrixXd J(m + 1, m + 1);
    const MatrixXd IU = MatrixXd::Identity(n_, n_) - at.prob.U;
    for (int k = 0; k < m; ++k) {
      MatrixXd E = MatrixXd::Zero(n_, n_);
      E(idx_[k].first, idx_[k].second) = 1.0;
      E(idx_[k].second, idx_[k].first) = 1.0;
      J.col(k).head(m) = vech(cee_residual_derivative(at.prob, at.P, E), idx_);
      const VectorXd da = IU * (at.prob.Gamma * E.col(0));
      J(m, k) = at.params.T.row(0).tail(n_).dot(da);
    }
    constexpr double kStep = 1e-7;
    VectorXd shifted = x;
    shifted(m) += kStep;
    const Point ahead = evaluate(shifted);
    J.col(m) = ahead.value.size() == m + 1
                   ? VectorXd((ahead.value - at.value) / kStep)
                   : VectorXd::Constant(m + 1, std::nan(""));
    return J;
  }

 private:
  MatrixXd X_;
  MonicPolynomial sigma_;
  double max_condition_;
  int n_;
  std::vector<std::pair<int, int>> idx_;
};

bool corrector(const ScaledSystem& sys, VectorXd& x, double tol,
               int max_iter) {
  ScaledSystem::Point pt = sys.evaluate(x);
  if (!pt.admissible) return false;
  double norm = pt.value.norm();
  for (int it = 0; it < max_iter && norm > tol; ++it) {
    const VectorXd step =
        sys.jacobian(x, pt).partialPivLu().solve(-pt.value);
    if (!step.allFinite()) return false;
    bool accepted = false;
    for (double alpha = 1.0; alpha > 1e-8; alpha *= 0.5) {
      const VectorXd trial = x + alpha * step;
      ScaledSystem::Point next = sys.evaluate(trial);
      if (next.admissible &&
          next.value.norm() <= (1.0 - 1e-4 * alpha) * norm) {
        x = trial;
        pt = std::move(next);
        norm = pt.value.norm();
        accepted = true;
        break;
      }
    }
    if (!accepted) return false;
  }
  return norm <= tol;
}

struct ScaledPath {
  VectorXd x;
  int steps = 0;
};

// Deforms the values from 1/2 (solved by P = 0, scale 1) to the data along
// v(t) = (1 - t) / 2 + t c, solving for P and the scale together.
std::optional<ScaledPath> follow_scaled_path(const MatrixXd& X1,
                                             const MonicPolynomial& sigma,
                                             const NPOptions& opts) {
  constexpr double kPathTol = 1e-10;
  constexpr int kCorrectorIter = 15;
  const Eigen::Index dim = X1.rows();
  const MatrixXd half = 0.5 * MatrixXd::Identity(dim, dim);
  auto system_at = [&](double t) {
    return ScaledSystem((1.0 - t) * half + t * X1, sigma, opts.max_condition);
  };
  ScaledPath path;
  path.x = VectorXd::Zero(system_at(0.0).unknowns());
  VectorXd x_prev;
  double t = 0.0;
  double t_prev = 0.0;
  double dt = 0.25;
  while (t < 1.0) {
    const double t_next = std::min(1.0, t + dt);
    VectorXd guess = path.x;
    if (x_prev.size() > 0) guess += (t_next - t) / (t - t_prev) * (path.x - x_prev);
    if (corrector(system_at(t_next), guess, kPathTol, kCorrectorIter)) {
      x_prev = path.x;
      t_prev = t;
      path.x = guess;
      t = t_next;
      ++path.steps;
      dt = std::min(2.0 * dt, 1.0);
    } else {
      dt *= 0.5;
      if (dt < opts.solve.min_path_step) return std::nullopt;
    }
  }
  // Best effort: tighten the end point before the fixed-scale polish.
  VectorXd tight = path.x;
  if (corrector(system_at(1.0), tight, opts.solve.tol, kCorrectorIter)) {
    path.x = tight;
  }
  return path;
}

struct Attempt {
  NPParams params;
  CEESolution cee;
  double first_row = 0.0;
};

NPParams scaled_params(const InterpolationData& data, double scale,
                       const NPOptions& opts) {
  InterpolationData scaled = data;
  scaled.values *= scale;
  return build_uU_np(build_T(scaled, opts.factor), opts.max_condition);
}

CEEProblem np_problem(const NPParams& params, const MonicPolynomial& sigma) {
  return make_problem(params.u, params.U, sigma, ProblemSource::kInterpolation,
                      params.first_row);
}

Attempt direct_attempt(const InterpolationData& data,
                       const MonicPolynomial& sigma, const NPOptions& opts) {
  Attempt out;
  out.params = scaled_params(data, 1.0, opts);
  out.cee = solve_cee(np_problem(out.params, sigma), opts.solve);
  out.first_row = first_row_residual(out.params, out.cee.a);
  return out;
}

std::optional<Attempt> scaled_attempt(const InterpolationData& data,
                                      const MonicPolynomial& sigma,
                                      const NPOptions& opts, double& scale) {
  const int n = sigma.degree();
  const MatrixXd X1 = build_T(data, TFactor::kCorrected).T +
                      0.5 * MatrixXd::Identity(n + 1, n + 1);
  const std::optional<ScaledPath> path = follow_scaled_path(X1, sigma, opts);
  if (!path) return std::nullopt;
  const int m = static_cast<int>(path->x.size()) - 1;
  scale = std::exp(path->x(m));

  Attempt out;
  out.params = scaled_params(data, scale, opts);
  const CEEProblem prob = np_problem(out.params, sigma);
  NewtonResult nr = newton_cee(prob, unvech(path->x.head(m), n, vech_index(n)),
                               opts.solve.tol, opts.solve.newton_max_iter);
  if (!nr.converged) return std::nullopt;
  out.cee = finalize_solution(prob, std::move(nr.P), opts.solve.rank_tol);
  out.cee.method_used = SolveMethod::kNewton;
  out.cee.iterations = nr.iterations;
  out.cee.path_steps = path->steps;
  out.first_row = first_row_residual(out.params, out.cee.a);
  return out;
}

}  // namespace

NPSolution solve_np(const InterpolationData& data, const MonicPolynomial& sigma,
                    const NPOptions& opts) {
  validate(data);
  if (sigma.degree() != data.n()) {
    Throw(ErrorKind::kInvalidInput,
          "solve_np: deg sigma must equal the number of nodes minus one");
  }
  const bool may_rescale = opts.rescale && opts.factor == TFactor::kCorrected;
  NPSolution out;
  std::optional<Attempt> best;
  try {
    best = direct_attempt(data, sigma, opts);
  } catch (const Error& e) {
    if (!may_rescale || e.kind() != ErrorKind::kSolver) throw;
  }
  if (may_rescale && (!best || std::abs(best->first_row) > opts.accept_tol)) {
    double scale = 1.0;
    std::optional<Attempt> found = scaled_attempt(data, sigma, opts, scale);
    if (found) {
      best = std::move(found);
      out.scale = scale;
    } else if (!best) {
      Throw(ErrorKind::kSolver,
            "solve_np: the CEE failed at unit scale and the joint "
            "scale path did not reach the data");
    }
  }
  out.params = std::move(best->params);
  out.cee = std::move(best->cee);
  out.first_row_residual = std::abs(best->first_row);
  out.interp_residual = interp_residual(out.cee.a, out.cee.b, data, out.scale);
  out.accepted = out.interp_residual <= opts.accept_tol;
  if (!out.accepted) {
    out.diagnostic = "interpolation residual " +
                     format_number(out.interp_residual) + " exceeds " +
                     format_number(opts.accept_tol) +
                     "; data unsolvable at this sigma";
  }
  return out;
}

}  // namespace covext
