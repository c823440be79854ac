#pragma once

#include "gradreg/types.hpp"

namespace gradreg {

/// A differentiable objective. loss/gradient/hvp are pure functions of their
/// inputs; implementations hold no mutable state and are safe to evaluate
/// concurrently.
class Objective {
 public:
  virtual ~Objective() = default;

  /// Number of parameters.
  virtual Index dim() const = 0;
  virtual double loss(const Vector& theta) const = 0;
  virtual Vector gradient(const Vector& theta) const = 0;
  /// Hessian-vector product H(theta) * v, matrix-free.
  virtual Vector hvp(const Vector& theta, const Vector& v) const = 0;
};

/// L(theta) = ||X theta - y||^2 / 2. No 1/n factor: the Hessian is exactly
/// X^T X and the GR gradient has the closed form X^T X X^T (X theta - y).
class LinearMseObjective final : public Objective {
 public:
  explicit LinearMseObjective(Dataset data) : data_(std::move(data)) {}

  Index dim() const override { return data_.dim(); }
  double loss(const Vector& theta) const override;
  Vector gradient(const Vector& theta) const override;
  Vector hvp(const Vector& theta, const Vector& v) const override;

  const Dataset& data() const { return data_; }

 private:
  Dataset data_;
};

/// Diagonal linear network. Parameters are stacked as w = (w_plus, w_minus),
/// each of length d, predicting <beta, x> with beta = w_plus^2 - w_minus^2
/// (squares elementwise). The loss carries a 1/4n factor:
///
///   L(w) = 1/(4n) * sum_j (<beta, x_j> - y_j)^2.
class DlnObjective final : public Objective {
 public:
  explicit DlnObjective(Dataset data) : data_(std::move(data)) {}

  Index dim() const override { return 2 * data_.dim(); }
  double loss(const Vector& w) const override;
  Vector gradient(const Vector& w) const override;
  Vector hvp(const Vector& w, const Vector& v) const override;

  const Dataset& data() const { return data_; }
  /// Residual r = X beta - y at the given parameters.
  Vector residual(const Vector& w) const;

  /// Assembles the full 2d x 2d Hessian
  ///   H = (1/n) (diag(Xt^T r) + 2 diag(w) Xt^T Xt diag(w)),  Xt = [X, -X].
  /// Only permitted for d <= kDenseHessianMaxDim; intended for eigensolver
  /// oracles on tiny instances.
  Matrix dense_hessian(const Vector& w) const;

  static constexpr Index kDenseHessianMaxDim = 64;

 private:
  Dataset data_;
};

/// Elementwise beta = w_plus^2 - w_minus^2 for stacked w of even length.
Vector beta_from_w(const Vector& w);

}  // namespace gradreg
