#pragma once

#include "gradreg/objective.hpp"
#include "gradreg/trainers.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace gradreg {

/// Per-coordinate initialization scale (alpha_0 or an effective alpha_GR).
/// Entries are strictly positive and finite by construction.
struct AlphaVector {
  Vector values;

  explicit AlphaVector(Vector v) : values(std::move(v)) {
    if (values.size() == 0) {
      throw std::invalid_argument("AlphaVector: empty");
    }
    for (Index i = 0; i < values.size(); ++i) {
      if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
        throw std::invalid_argument("AlphaVector: entries must be strictly positive and finite");
      }
    }
  }

  Index size() const { return values.size(); }
};

/// q(z) = 2 - sqrt(4 + z^2) + z asinh(z/2). Even, convex, q(0) = 0;
/// ~ z^2/4 near zero and ~ |z| (ln|z| - ...) in the tails.
double q_potential(double z);

/// Hyperbolic-entropy potential phi_alpha(beta) = sum_i alpha_i^2 q(beta_i / alpha_i^2).
double phi_alpha(const Vector& beta, const AlphaVector& alpha);

/// Thrown when the interpolation solver fails to converge; carries the last
/// constraint residual.
class NewtonError : public std::runtime_error {
 public:
  NewtonError(const std::string& msg, double residual)
      : std::runtime_error(msg), last_residual(residual) {}
  double last_residual;
};

struct InterpolationOptions {
  double constraint_tol = 1e-11;  // target for ||X beta - y||_inf
  int max_iterations = 200;
  int max_backtracks = 60;
};

struct InterpolationSolution {
  Vector beta;
  Vector nu;  // Lagrange multiplier of the KKT system
  int iterations = 0;
  double constraint_residual = 0.0;  // ||X beta - y||_inf
  double kkt_residual = 0.0;         // ||asinh(beta / 2 alpha^2) - X^T nu||_inf
};

/// Solves argmin_{X beta = y} phi_alpha(beta) through its KKT form
/// beta = 2 alpha^2 o sinh(X^T nu), by damped Newton iteration on
/// F(nu) = X (2 alpha^2 o sinh(X^T nu)) - y starting from nu = 0. The
/// Jacobian 2 X diag(alpha^2 o cosh(X^T nu)) X^T is positive definite for
/// full-row-rank X, so the Newton direction always descends ||F||; trial
/// states that overflow are rejected by the backtracking line search, and the
/// solver raises rather than returning a saturated state.
InterpolationSolution solve_interpolation(const Dataset& data, const AlphaVector& alpha,
                                          const InterpolationOptions& opts = {});

/// alpha_GR estimate sqrt(w+ o w-) from trained weights. Errors if any
/// product is non-positive (the estimator's domain was left).
AlphaVector alpha_gr_from_weights(const Vector& w);

/// Trajectory-integral prediction alpha_0 o exp(-gamma Psi / n^2).
AlphaVector predicted_alpha_gr(const AlphaVector& alpha0, double gamma,
                               const TrajectoryAccumulators& acc, Index n);

/// Closed-form first-order exponent c1 = (X^T (X beta0 - y))^2 / (2 n^2).
Vector c1_exponent(const Dataset& data, const Vector& beta0);

/// Exponent estimates from a completed DLN run: c0_hat = Psi0 / n^2 and
/// c2_hat = Psi2 / n^4 from the accumulators, c1 in closed form from the
/// initial point.
struct ExponentReport {
  Vector c0_hat, c1, c2_hat, psi1_hat, b0_squared;

  static ExponentReport from_run(const Dataset& data, const Vector& beta0,
                                 const TrajectoryAccumulators& acc);
};

class PowerIterationError : public std::runtime_error {
 public:
  PowerIterationError(const std::string& msg, double estimate)
      : std::runtime_error(msg), last_estimate(estimate) {}
  double last_estimate;
};

/// Largest Hessian eigenvalue at w by power iteration on the matrix-free
/// HVP (general Hessian, valid away from minima). Converges when the
/// Rayleigh quotient changes by at most tol relatively; restarts from several
/// random unit vectors and, when the dominant-magnitude eigenvalue is
/// negative, reruns on the positively shifted operator so the top (not the
/// largest-magnitude) eigenvalue is returned.
double dln_hessian_top_eig(const DlnObjective& obj, const Vector& w, double tol = 1e-10,
                           int max_iters = 10000, std::uint64_t seed = 0x9c0ffee1u);

/// Smallest eigenvalue of S = X diag(w+^2 + w-^2) X^T via a dense symmetric
/// eigensolver; n must be small enough for dense assembly.
double assumption_s_min_eig(const Dataset& data, const Vector& w);

/// Upper/lower-bound diagnostics on alpha_GR shrinkage. For a forward run
/// (eps > 0), satisfied_fraction is the fraction of coordinates with
/// c1_i > 0 obeying alpha_GR_i <= alpha0_i exp(-gamma eps c1_i / 2); for a
/// backward run it is NaN and only the entrywise ratio is meaningful.
struct Prop44Diagnostic {
  double satisfied_fraction = 0.0;
  Vector alpha_ratio;  // alpha_GR / alpha_0
};

Prop44Diagnostic prop44_check(const AlphaVector& alpha0, const AlphaVector& alpha_gr,
                              const Vector& c1, double gamma, double eps);

}  // namespace gradreg
