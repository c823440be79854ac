#include "gradreg/objective.hpp"

namespace gradreg {

double LinearMseObjective::loss(const Vector& theta) const {
  check_dim(theta, data_.dim(), "LinearMseObjective::loss");
  return 0.5 * (data_.X * theta - data_.y).squaredNorm();
}

Vector LinearMseObjective::gradient(const Vector& theta) const {
  check_dim(theta, data_.dim(), "LinearMseObjective::gradient");
  return data_.X.transpose() * (data_.X * theta - data_.y);
}

Vector LinearMseObjective::hvp(const Vector& theta, const Vector& v) const {
  check_dim(theta, data_.dim(), "LinearMseObjective::hvp");
  check_dim(v, data_.dim(), "LinearMseObjective::hvp");
  return data_.X.transpose() * (data_.X * v);
}

double DlnObjective::loss(const Vector& w) const {
  check_dim(w, dim(), "DlnObjective::loss");
  const auto n = static_cast<double>(data_.n_samples());
  return residual(w).squaredNorm() / (4.0 * n);
}

Vector DlnObjective::residual(const Vector& w) const {
  check_dim(w, dim(), "DlnObjective::residual");
  return data_.X * beta_from_w(w) - data_.y;
}

Vector DlnObjective::gradient(const Vector& w) const {
  check_dim(w, dim(), "DlnObjective::gradient");
  const Index d = data_.dim();
  const auto n = static_cast<double>(data_.n_samples());
  const Vector b = data_.X.transpose() * residual(w);  // X^T r
  Vector g(2 * d);
  g.head(d) = b.cwiseProduct(w.head(d)) / n;
  g.tail(d) = -b.cwiseProduct(w.tail(d)) / n;
  return g;
}

Vector DlnObjective::hvp(const Vector& w, const Vector& v) const {
  check_dim(w, dim(), "DlnObjective::hvp");
  check_dim(v, dim(), "DlnObjective::hvp");
  const Index d = data_.dim();
  const auto n = static_cast<double>(data_.n_samples());
  const Vector b = data_.X.transpose() * residual(w);
  // Xt (w o v) with Xt = [X, -X], evaluated as two X products.
  const Vector u = data_.X * (w.head(d).cwiseProduct(v.head(d)) -
                              w.tail(d).cwiseProduct(v.tail(d)));
  const Vector xtu = data_.X.transpose() * u;
  Vector out(2 * d);
  out.head(d) = (b.cwiseProduct(v.head(d)) + 2.0 * w.head(d).cwiseProduct(xtu)) / n;
  out.tail(d) = (-b.cwiseProduct(v.tail(d)) - 2.0 * w.tail(d).cwiseProduct(xtu)) / n;
  return out;
}

Matrix DlnObjective::dense_hessian(const Vector& w) const {
  check_dim(w, dim(), "DlnObjective::dense_hessian");
  const Index d = data_.dim();
  if (d > kDenseHessianMaxDim) {
    throw std::invalid_argument(
        "DlnObjective::dense_hessian: d = " + std::to_string(d) +
        " exceeds the dense limit " + std::to_string(kDenseHessianMaxDim) +
        "; use hvp instead");
  }
  const Index n = data_.n_samples();
  Matrix xt(n, 2 * d);
  xt.leftCols(d) = data_.X;
  xt.rightCols(d) = -data_.X;
  const Vector bt = xt.transpose() * residual(w);  // Xt^T r
  Matrix h = 2.0 * w.asDiagonal() * (xt.transpose() * xt) * w.asDiagonal();
  h.diagonal() += bt;
  return h / static_cast<double>(n);
}

Vector beta_from_w(const Vector& w) {
  if (w.size() % 2 != 0) {
    throw std::invalid_argument("beta_from_w: stacked parameter vector must have even length");
  }
  const Index d = w.size() / 2;
  return w.head(d).array().square().matrix() - w.tail(d).array().square().matrix();
}

}  // namespace gradreg
