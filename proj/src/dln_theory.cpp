#include "gradreg/dln_theory.hpp"

#include "gradreg/rng.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>

namespace gradreg {

namespace {
constexpr double kSinhArgLimit = 700.0;  // cosh overflows past ~710
constexpr Index kDenseEigMaxSamples = 2048;
}  // namespace

double q_potential(double z) {
  return 2.0 - std::sqrt(4.0 + z * z) + z * std::asinh(0.5 * z);
}

double phi_alpha(const Vector& beta, const AlphaVector& alpha) {
  check_dim(beta, alpha.size(), "phi_alpha");
  double sum = 0.0;
  for (Index i = 0; i < beta.size(); ++i) {
    const double a2 = alpha.values[i] * alpha.values[i];
    sum += a2 * q_potential(beta[i] / a2);
  }
  return sum;
}

InterpolationSolution solve_interpolation(const Dataset& data, const AlphaVector& alpha,
                                          const InterpolationOptions& opts) {
  const Index n = data.n_samples();
  const Index d = data.dim();
  if (alpha.size() != d) {
    throw std::invalid_argument("solve_interpolation: alpha dimension mismatch");
  }
  if (n > d) {
    throw std::invalid_argument("solve_interpolation: requires n <= d (overparameterized)");
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(data.X.transpose());
  if (qr.rank() < n) {
    throw std::invalid_argument("solve_interpolation: X is rank-deficient");
  }

  const Vector alpha2 = alpha.values.array().square().matrix();
  const auto eval_beta = [&](const Vector& u) -> Vector {
    return 2.0 * alpha2.cwiseProduct(u.array().sinh().matrix());
  };

  Vector nu = Vector::Zero(n);
  Vector u = Vector::Zero(d);
  Vector f = -data.y;  // F(0) = X (2 alpha^2 sinh(0)) - y
  double fnorm = f.lpNorm<Eigen::Infinity>();

  int iter = 0;
  for (; iter < opts.max_iterations && fnorm > opts.constraint_tol; ++iter) {
    const Vector diag = 2.0 * alpha2.cwiseProduct(u.array().cosh().matrix());
    if (!diag.allFinite()) {
      throw NewtonError("solve_interpolation: Jacobian overflow (|X^T nu| too large)", fnorm);
    }
    const Matrix jac = data.X * diag.asDiagonal() * data.X.transpose();
    Eigen::LLT<Matrix> llt(jac);
    if (llt.info() != Eigen::Success) {
      throw NewtonError("solve_interpolation: Jacobian factorization failed", fnorm);
    }
    const Vector step = llt.solve(-f);

    // backtracking on ||F||; overflowing trials are rejected the same way
    double s = 1.0;
    bool accepted = false;
    for (int k = 0; k < opts.max_backtracks; ++k, s *= 0.5) {
      const Vector nu_try = nu + s * step;
      const Vector u_try = data.X.transpose() * nu_try;
      if (u_try.lpNorm<Eigen::Infinity>() > kSinhArgLimit) continue;
      const Vector f_try = data.X * eval_beta(u_try) - data.y;
      const double fnorm_try = f_try.lpNorm<Eigen::Infinity>();
      if (std::isfinite(fnorm_try) && fnorm_try < fnorm * (1.0 - 1e-4 * s)) {
        nu = nu_try;
        u = u_try;
        f = f_try;
        fnorm = fnorm_try;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      throw NewtonError("solve_interpolation: line search stalled at residual " +
                            std::to_string(fnorm),
                        fnorm);
    }
  }
  if (fnorm > opts.constraint_tol) {
    throw NewtonError("solve_interpolation: no convergence after " +
                          std::to_string(opts.max_iterations) + " iterations, residual " +
                          std::to_string(fnorm),
                      fnorm);
  }

  InterpolationSolution sol;
  sol.beta = eval_beta(u);
  sol.nu = nu;
  sol.iterations = iter;
  sol.constraint_residual = fnorm;
  sol.kkt_residual =
      ((sol.beta.cwiseQuotient(2.0 * alpha2)).array().asinh().matrix() - u)
          .lpNorm<Eigen::Infinity>();
  return sol;
}

AlphaVector alpha_gr_from_weights(const Vector& w) {
  if (w.size() % 2 != 0) {
    throw std::invalid_argument("alpha_gr_from_weights: stacked vector must have even length");
  }
  const Index d = w.size() / 2;
  const Vector prod = w.head(d).cwiseProduct(w.tail(d));
  for (Index i = 0; i < d; ++i) {
    if (!(prod[i] > 0.0)) {
      throw std::domain_error(
          "alpha_gr_from_weights: w+ o w- has a non-positive entry at coordinate " +
          std::to_string(i));
    }
  }
  return AlphaVector(prod.cwiseSqrt());
}

AlphaVector predicted_alpha_gr(const AlphaVector& alpha0, double gamma,
                               const TrajectoryAccumulators& acc, Index n) {
  if (acc.empty()) {
    throw std::invalid_argument("predicted_alpha_gr: accumulators are empty (non-DLN run?)");
  }
  check_dim(acc.psi, alpha0.size(), "predicted_alpha_gr");
  const double n2 = static_cast<double>(n) * static_cast<double>(n);
  return AlphaVector(
      alpha0.values.cwiseProduct((-(gamma / n2) * acc.psi).array().exp().matrix()));
}

Vector c1_exponent(const Dataset& data, const Vector& beta0) {
  check_dim(beta0, data.dim(), "c1_exponent");
  const auto n = static_cast<double>(data.n_samples());
  const Vector b0 = data.X.transpose() * (data.X * beta0 - data.y);
  return b0.array().square().matrix() / (2.0 * n * n);
}

ExponentReport ExponentReport::from_run(const Dataset& data, const Vector& beta0,
                                        const TrajectoryAccumulators& acc) {
  if (acc.empty()) {
    throw std::invalid_argument("ExponentReport: accumulators are empty");
  }
  const auto n = static_cast<double>(data.n_samples());
  ExponentReport rep;
  rep.c0_hat = acc.psi0 / (n * n);
  rep.c1 = c1_exponent(data, beta0);
  rep.c2_hat = acc.psi2 / (n * n * n * n);
  rep.psi1_hat = acc.psi1;
  rep.b0_squared = acc.b0_squared;
  return rep;
}

namespace {

// One power-iteration pass on op(v) = H v + shift v. Returns the converged
// Rayleigh quotient (of the shifted operator) or nullopt-like failure via
// the bool flag.
struct PowerPass {
  double value = 0.0;
  bool converged = false;
};

template <typename Op>
PowerPass power_pass(const Op& op, Vector v, double tol, int max_iters) {
  PowerPass out;
  double rq_prev = 0.0;
  v.normalize();
  for (int k = 0; k < max_iters; ++k) {
    Vector hv = op(v);
    const double rq = v.dot(hv);
    const double hv_norm = hv.norm();
    if (hv_norm == 0.0) {
      out.value = 0.0;
      out.converged = true;
      return out;
    }
    if (k > 0 && std::abs(rq - rq_prev) <= tol * std::max(1.0, std::abs(rq))) {
      out.value = rq;
      out.converged = true;
      return out;
    }
    rq_prev = rq;
    v = hv / hv_norm;
  }
  out.value = rq_prev;
  return out;
}

}  // namespace

double dln_hessian_top_eig(const DlnObjective& obj, const Vector& w, double tol, int max_iters,
                           std::uint64_t seed) {
  check_dim(w, obj.dim(), "dln_hessian_top_eig");
  if (!(tol > 0.0)) {
    throw std::invalid_argument("dln_hessian_top_eig: tol must be > 0");
  }
  constexpr int kRestarts = 10;
  const Index dim = obj.dim();

  const auto random_start = [&](int restart) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(restart)));
    Vector v(dim);
    for (Index i = 0; i < dim; ++i) v[i] = rng.normal(0.0, 1.0);
    return v;
  };

  // Magnitude estimate by a short raw pass. The general Hessian can carry
  // near-tied +/- extreme eigenvalues that make unshifted iteration oscillate,
  // so no convergence is demanded here; |Rayleigh| after a bounded number of
  // steps is enough to size a positive shift.
  const auto raw = [&](const Vector& v) { return obj.hvp(w, v); };
  double magnitude = 0.0;
  for (int restart = 0; restart < 4; ++restart) {
    Vector v = random_start(restart);
    v.normalize();
    for (int k = 0; k < std::min(500, max_iters); ++k) {
      const Vector hv = raw(v);
      const double hv_norm = hv.norm();
      if (hv_norm == 0.0) break;
      magnitude = std::max(magnitude, std::abs(v.dot(hv)));
      v = hv / hv_norm;
    }
  }
  if (magnitude == 0.0) {
    return 0.0;  // zero Hessian
  }

  // Shifted spectrum lies in (0, lambda_max + shift], so the top eigenvalue
  // is the dominant one and the iteration converges monotonically.
  const double shift = 1.5 * magnitude;
  const auto shifted = [&](const Vector& v) -> Vector { return obj.hvp(w, v) + shift * v; };
  double best = 0.0;
  double last = 0.0;
  bool any = false;
  for (int restart = 0; restart < kRestarts; ++restart) {
    const PowerPass pass = power_pass(shifted, random_start(kRestarts + restart), tol, max_iters);
    last = pass.value - shift;
    if (pass.converged) {
      any = true;
      best = std::max(best, pass.value);
    }
  }
  if (!any) {
    throw PowerIterationError("dln_hessian_top_eig: power iteration did not converge", last);
  }
  return best - shift;
}

double assumption_s_min_eig(const Dataset& data, const Vector& w) {
  check_dim(w, 2 * data.dim(), "assumption_s_min_eig");
  const Index n = data.n_samples();
  if (n > kDenseEigMaxSamples) {
    throw std::invalid_argument(
        "assumption_s_min_eig: n = " + std::to_string(n) +
        " too large for dense assembly; subsample the trajectory states instead");
  }
  const Index d = data.dim();
  const Vector a =
      w.head(d).array().square().matrix() + w.tail(d).array().square().matrix();
  const Matrix s = data.X * a.asDiagonal() * data.X.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("assumption_s_min_eig: eigensolver failed");
  }
  return es.eigenvalues().minCoeff();
}

Prop44Diagnostic prop44_check(const AlphaVector& alpha0, const AlphaVector& alpha_gr,
                              const Vector& c1, double gamma, double eps) {
  check_dim(alpha_gr.values, alpha0.size(), "prop44_check");
  check_dim(c1, alpha0.size(), "prop44_check");
  Prop44Diagnostic diag;
  diag.alpha_ratio = alpha_gr.values.cwiseQuotient(alpha0.values);
  if (eps > 0.0) {
    Index eligible = 0;
    Index satisfied = 0;
    for (Index i = 0; i < c1.size(); ++i) {
      if (!(c1[i] > 0.0)) continue;
      ++eligible;
      if (alpha_gr.values[i] <= alpha0.values[i] * std::exp(-0.5 * gamma * eps * c1[i])) {
        ++satisfied;
      }
    }
    diag.satisfied_fraction =
        eligible == 0 ? 1.0 : static_cast<double>(satisfied) / static_cast<double>(eligible);
  } else {
    diag.satisfied_fraction = std::numeric_limits<double>::quiet_NaN();
  }
  return diag;
}

}  // namespace gradreg
