#include "gradreg/gr_methods.hpp"

namespace gradreg {

GrMethod GrMethod::forward_fd(double eps) {
  if (!(eps > 0.0)) {
    throw std::invalid_argument("GrMethod::forward_fd: epsilon must be > 0");
  }
  return {GrKind::ForwardFD, eps};
}

GrMethod GrMethod::backward_fd(double eps) {
  if (!(eps > 0.0)) {
    throw std::invalid_argument("GrMethod::backward_fd: epsilon must be > 0");
  }
  return {GrKind::BackwardFD, eps};
}

double GrMethod::signed_epsilon() const {
  switch (kind) {
    case GrKind::ForwardFD:
      return epsilon;
    case GrKind::BackwardFD:
      return -epsilon;
    default:
      return 0.0;
  }
}

const char* GrMethod::name() const {
  switch (kind) {
    case GrKind::None:
      return "none";
    case GrKind::ForwardFD:
      return "fgr";
    case GrKind::BackwardFD:
      return "bgr";
    case GrKind::DoubleBackprop:
      return "db";
  }
  return "unknown";
}

GrMethod gr_method_from_name(const std::string& name, double eps) {
  if (name == "none") return GrMethod::none();
  if (name == "fgr") return GrMethod::forward_fd(eps);
  if (name == "bgr") return GrMethod::backward_fd(eps);
  if (name == "db") return GrMethod::double_backprop();
  throw std::invalid_argument("unknown GR method name: " + name);
}

void GrConfig::validate() const {
  if (!(gamma >= 0.0)) {
    throw std::invalid_argument("GrConfig: gamma must be >= 0");
  }
  if ((method.kind == GrKind::ForwardFD || method.kind == GrKind::BackwardFD) &&
      !(method.epsilon > 0.0)) {
    throw std::invalid_argument("GrConfig: finite-difference methods require epsilon > 0");
  }
}

Vector delta_r_forward(const Objective& obj, const Vector& theta, double eps) {
  if (eps == 0.0) {
    throw std::invalid_argument("delta_r_forward: eps must be non-zero (use delta_r_db for the exact limit)");
  }
  const Vector g = obj.gradient(theta);
  const Vector g_ascent = obj.gradient(theta + eps * g);
  return (g_ascent - g) / eps;
}

Vector delta_r_backward(const Objective& obj, const Vector& theta, double eps) {
  if (!(eps > 0.0)) {
    throw std::invalid_argument("delta_r_backward: eps must be > 0");
  }
  return delta_r_forward(obj, theta, -eps);
}

Vector delta_r_db(const Objective& obj, const Vector& theta) {
  return obj.hvp(theta, obj.gradient(theta));
}

Vector regularized_gradient(const Objective& obj, const Vector& theta, const GrConfig& cfg) {
  cfg.validate();
  if (cfg.method.kind == GrKind::None || cfg.gamma == 0.0) {
    return obj.gradient(theta);
  }
  if (cfg.method.kind == GrKind::DoubleBackprop) {
    const Vector g = obj.gradient(theta);
    return g + cfg.gamma * obj.hvp(theta, g);
  }
  const double eps = cfg.method.signed_epsilon();
  const Vector g = obj.gradient(theta);
  const Vector g_ascent = obj.gradient(theta + eps * g);
  const double q2 = cfg.gamma / eps;
  return (1.0 - q2) * g + q2 * g_ascent;
}

Vector avg_hessian_quadrature(const Objective& obj, const Vector& theta, double eps, int nodes) {
  if (nodes < 1) {
    throw std::invalid_argument("avg_hessian_quadrature: need at least one node");
  }
  const Vector g = obj.gradient(theta);
  Vector sum = Vector::Zero(theta.size());
  for (int i = 0; i < nodes; ++i) {
    const double s = eps * (static_cast<double>(i) + 0.5) / static_cast<double>(nodes);
    sum += obj.hvp(theta + s * g, g);
  }
  return sum / static_cast<double>(nodes);
}

}  // namespace gradreg
