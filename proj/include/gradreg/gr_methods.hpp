#pragma once

#include "gradreg/objective.hpp"

namespace gradreg {

enum class GrKind { None, ForwardFD, BackwardFD, DoubleBackprop };

/// Choice of regularizer-gradient algorithm. The finite-difference kinds
/// carry an ascent step epsilon > 0; the sign is encoded by the kind
/// (BackwardFD(eps) is ForwardFD(-eps)).
struct GrMethod {
  GrKind kind = GrKind::None;
  double epsilon = 0.0;

  static GrMethod none() { return {GrKind::None, 0.0}; }
  static GrMethod forward_fd(double eps);
  static GrMethod backward_fd(double eps);
  static GrMethod double_backprop() { return {GrKind::DoubleBackprop, 0.0}; }

  /// +eps for ForwardFD, -eps for BackwardFD, 0 otherwise.
  double signed_epsilon() const;
  const char* name() const;
};

GrMethod gr_method_from_name(const std::string& name, double eps);

struct GrConfig {
  GrMethod method;
  double gamma = 0.0;  // regularization coefficient, >= 0

  void validate() const;
};

/// Forward finite-difference regularizer gradient
///   (grad L(theta + eps grad L(theta)) - grad L(theta)) / eps,
/// exactly two gradient evaluations. Negative eps is permitted (that is the
/// backward variant); eps = 0 is an error. No cancellation guard: below
/// |eps| ~ 1e-8 the subtraction loses most significant digits and the result
/// degrades visibly; use delta_r_db for the exact eps -> 0 limit.
Vector delta_r_forward(const Objective& obj, const Vector& theta, double eps);

/// Backward variant, defined as delta_r_forward with -eps. Requires eps > 0.
Vector delta_r_backward(const Objective& obj, const Vector& theta, double eps);

/// Exact regularizer gradient H(theta) grad L(theta) via the objective's
/// Hessian-vector product.
Vector delta_r_db(const Objective& obj, const Vector& theta);

/// Full update direction grad L + gamma * DeltaR. For the finite-difference
/// kinds this is evaluated in the blended form
///   (1 - gamma/eps) grad L(theta) + (gamma/eps) grad L(theta'),
/// which is algebraically identical and reproduces the SAM update bit-exactly
/// at gamma = eps. With kind None or gamma = 0 returns grad L(theta) alone.
Vector regularized_gradient(const Objective& obj, const Vector& theta, const GrConfig& cfg);

/// Composite-midpoint estimate of (1/eps) * int_0^eps H(theta + s g) g ds
/// with g = grad L(theta). This equals delta_r_forward(eps) exactly in the
/// limit of many nodes (mean value theorem) and serves as an independent
/// oracle for the finite-difference kernels.
Vector avg_hessian_quadrature(const Objective& obj, const Vector& theta, double eps, int nodes);

}  // namespace gradreg
