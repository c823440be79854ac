#include "gradreg/trainers.hpp"

#include <cmath>

namespace gradreg {

const char* TrainStatus::name() const {
  switch (outcome) {
    case TrainOutcome::Converged:
      return "converged";
    case TrainOutcome::MaxSteps:
      return "max_steps";
    case TrainOutcome::Exploded:
      return "exploded";
  }
  return "unknown";
}

void TrainConfig::validate() const {
  gr.validate();
  if (!(eta > 0.0)) throw std::invalid_argument("TrainConfig: eta must be > 0");
  if (max_steps < 1) throw std::invalid_argument("TrainConfig: max_steps must be >= 1");
  if (!(loss_tol > 0.0)) throw std::invalid_argument("TrainConfig: loss_tol must be > 0");
  if (!(explode_threshold > 0.0)) {
    throw std::invalid_argument("TrainConfig: explode_threshold must be > 0");
  }
  if (!(loss_tol < explode_threshold)) {
    throw std::invalid_argument("TrainConfig: loss_tol must be below explode_threshold");
  }
}

void SamConfig::validate() const {
  if (!(rho > 0.0) && rho != 0.0) throw std::invalid_argument("SamConfig: rho must be >= 0");
}

void FloodConfig::validate() const {
  if (!(flood_level > 0.0)) throw std::invalid_argument("FloodConfig: flood_level must be > 0");
  if (!(eta > 0.0)) throw std::invalid_argument("FloodConfig: eta must be > 0");
  if (max_steps < 1) throw std::invalid_argument("FloodConfig: max_steps must be >= 1");
}

namespace {

// Per-step state of the specialized DLN loop. Everything derives from w in
// one pass so the gradient, the regularized direction and the trajectory
// integrands share the same intermediates.
struct DlnStepWorkspace {
  Vector beta, r, b, g, a;
  Vector w_ascent, beta_ascent, r_ascent, b_ascent, g_ascent;
  Vector acc_tmp1, acc_tmp2;

  double dln_loss_grad(const Matrix& x, const Vector& y, const Vector& w, Index d, double n) {
    beta = w.head(d).array().square().matrix() - w.tail(d).array().square().matrix();
    r.noalias() = x * beta;
    r -= y;
    const double loss = r.squaredNorm() / (4.0 * n);
    b.noalias() = x.transpose() * r;
    g.resize(2 * d);
    g.head(d) = b.cwiseProduct(w.head(d)) / n;
    g.tail(d) = -b.cwiseProduct(w.tail(d)) / n;
    return loss;
  }
};

GdResult run_dln(const DlnObjective& obj, const Vector& w0, const TrainConfig& cfg) {
  const Matrix& x = obj.data().X;
  const Vector& y = obj.data().y;
  const Index d = obj.data().dim();
  const auto n = static_cast<double>(obj.data().n_samples());
  const double eps = cfg.gr.method.signed_epsilon();
  const double gamma = cfg.gr.gamma;
  const bool fd = (cfg.gr.method.kind == GrKind::ForwardFD ||
                   cfg.gr.method.kind == GrKind::BackwardFD) && gamma > 0.0;
  const bool db = cfg.gr.method.kind == GrKind::DoubleBackprop && gamma > 0.0;
  const double q2 = fd ? gamma / eps : 0.0;
  const double q1 = 1.0 - q2;

  GdResult out;
  out.w = w0;
  out.acc.psi = Vector::Zero(d);
  out.acc.psi0 = Vector::Zero(d);
  out.acc.psi1 = Vector::Zero(d);
  out.acc.psi2 = Vector::Zero(d);

  DlnStepWorkspace ws;
  Vector direction(2 * d), hv(2 * d), u(x.rows()), xtu(d);
  for (long t = 0; t <= cfg.max_steps; ++t) {
    const double loss = ws.dln_loss_grad(x, y, out.w, d, n);
    out.final_loss = loss;
    if (t == 0) out.acc.b0_squared = ws.b.array().square().matrix();
    if (!std::isfinite(loss) || loss > cfg.explode_threshold) {
      out.status = {TrainOutcome::Exploded, t};
      return out;
    }
    if (loss < cfg.loss_tol) {
      out.status = {TrainOutcome::Converged, t};
      return out;
    }
    if (t == cfg.max_steps) break;

    // integrands at the current point (left endpoint, weight eta)
    ws.a = out.w.head(d).array().square().matrix() + out.w.tail(d).array().square().matrix();
    ws.acc_tmp1.noalias() = x.transpose() * (x * ws.b.cwiseProduct(ws.a));
    out.acc.psi1 += (2.0 * cfg.eta) * ws.b.cwiseProduct(ws.acc_tmp1);
    ws.acc_tmp2.noalias() =
        x.transpose() * (x * ws.b.array().square().matrix().cwiseProduct(ws.beta));
    out.acc.psi2 += cfg.eta * ws.b.cwiseProduct(ws.acc_tmp2);
    out.acc.psi0 += cfg.eta * ws.b.array().square().matrix();

    if (eps != 0.0) {
      ws.w_ascent = out.w + eps * ws.g;
      ws.beta_ascent = ws.w_ascent.head(d).array().square().matrix() -
                       ws.w_ascent.tail(d).array().square().matrix();
      ws.r_ascent.noalias() = x * ws.beta_ascent;
      ws.r_ascent -= y;
      ws.b_ascent.noalias() = x.transpose() * ws.r_ascent;
      out.acc.psi += cfg.eta * ws.b_ascent.cwiseProduct(ws.b);
    } else {
      out.acc.psi += cfg.eta * ws.b.array().square().matrix();
    }

    if (fd) {
      ws.g_ascent.resize(2 * d);
      ws.g_ascent.head(d) = ws.b_ascent.cwiseProduct(ws.w_ascent.head(d)) / n;
      ws.g_ascent.tail(d) = -ws.b_ascent.cwiseProduct(ws.w_ascent.tail(d)) / n;
      direction = q1 * ws.g + q2 * ws.g_ascent;
    } else if (db) {
      u.noalias() = x * (out.w.head(d).cwiseProduct(ws.g.head(d)) -
                         out.w.tail(d).cwiseProduct(ws.g.tail(d)));
      xtu.noalias() = x.transpose() * u;
      hv.head(d) = (ws.b.cwiseProduct(ws.g.head(d)) +
                    2.0 * out.w.head(d).cwiseProduct(xtu)) / n;
      hv.tail(d) = (-ws.b.cwiseProduct(ws.g.tail(d)) -
                    2.0 * out.w.tail(d).cwiseProduct(xtu)) / n;
      direction = ws.g + gamma * hv;
    } else {
      direction = ws.g;
    }
    out.w -= cfg.eta * direction;
  }
  out.status = {TrainOutcome::MaxSteps, cfg.max_steps};
  return out;
}

GdResult run_generic(const Objective& obj, const Vector& w0, const TrainConfig& cfg) {
  GdResult out;
  out.w = w0;
  for (long t = 0; t <= cfg.max_steps; ++t) {
    const double loss = obj.loss(out.w);
    out.final_loss = loss;
    if (!std::isfinite(loss) || loss > cfg.explode_threshold) {
      out.status = {TrainOutcome::Exploded, t};
      return out;
    }
    if (loss < cfg.loss_tol) {
      out.status = {TrainOutcome::Converged, t};
      return out;
    }
    if (t == cfg.max_steps) break;
    out.w -= cfg.eta * regularized_gradient(obj, out.w, cfg.gr);
  }
  out.status = {TrainOutcome::MaxSteps, cfg.max_steps};
  return out;
}

}  // namespace

GdResult gd_train(const Objective& obj, const Vector& w0, const TrainConfig& cfg) {
  cfg.validate();
  check_dim(w0, obj.dim(), "gd_train");
  check_finite(w0, "gd_train: w0");
  if (!std::isfinite(obj.loss(w0))) {
    throw std::invalid_argument("gd_train: loss at w0 is not finite");
  }
  if (const auto* dln = dynamic_cast<const DlnObjective*>(&obj)) {
    return run_dln(*dln, w0, cfg);
  }
  return run_generic(obj, w0, cfg);
}

Vector gd_step(const Objective& obj, const Vector& theta, const GrConfig& gr, double eta) {
  return theta - eta * regularized_gradient(obj, theta, gr);
}

StepIntegrands step_integrands(const DlnObjective& obj, const Vector& w, double eps) {
  check_dim(w, obj.dim(), "step_integrands");
  const Matrix& x = obj.data().X;
  const Index d = obj.data().dim();

  StepIntegrands out;
  const Vector beta = beta_from_w(w);
  const Vector r = x * beta - obj.data().y;
  const Vector b = x.transpose() * r;
  const Vector a = w.head(d).array().square().matrix() + w.tail(d).array().square().matrix();

  out.b_squared = b.array().square().matrix();
  out.z = 2.0 * b.cwiseProduct(x.transpose() * (x * b.cwiseProduct(a)));
  out.z_h = b.cwiseProduct(x.transpose() * (x * out.b_squared.cwiseProduct(beta)));
  if (eps != 0.0) {
    const Vector w_ascent = w + eps * obj.gradient(w);
    const Vector r_ascent = x * beta_from_w(w_ascent) - obj.data().y;
    out.psi = (x.transpose() * r_ascent).cwiseProduct(b);
  } else {
    out.psi = out.b_squared;
  }
  return out;
}

Vector sam_step(const Objective& obj, const Vector& theta, const SamConfig& cfg, double eta) {
  cfg.validate();
  const Vector g = obj.gradient(theta);
  double eps_t = cfg.rho;
  if (cfg.normalized) {
    const double gnorm = g.norm();
    if (gnorm == 0.0) {
      throw std::invalid_argument("sam_step: normalized SAM is undefined at a zero gradient");
    }
    eps_t = cfg.rho / gnorm;
  }
  return theta - eta * obj.gradient(theta + eps_t * g);
}

Vector flooding_step(const Objective& obj, const Vector& theta, const FloodConfig& cfg) {
  cfg.validate();
  const double sign = obj.loss(theta) >= cfg.flood_level ? 1.0 : -1.0;
  return theta - (cfg.eta * sign) * obj.gradient(theta);
}

FloodResult flooding_train(const Objective& obj, const Vector& theta0, const FloodConfig& cfg) {
  cfg.validate();
  check_finite(theta0, "flooding_train: theta0");
  FloodResult out;
  out.theta = theta0;
  out.trace.loss.reserve(cfg.max_steps);
  out.trace.grad_sq_norm.reserve(cfg.max_steps);
  out.trace.flip_rate.reserve(cfg.max_steps);
  long flips = 0;
  double prev_sign = 0.0;
  for (long t = 0; t < cfg.max_steps; ++t) {
    const double loss = obj.loss(out.theta);
    const Vector g = obj.gradient(out.theta);
    const double sign = loss >= cfg.flood_level ? 1.0 : -1.0;
    if (t > 0 && sign != prev_sign) ++flips;
    prev_sign = sign;
    out.trace.loss.push_back(loss);
    out.trace.grad_sq_norm.push_back(g.squaredNorm());
    out.trace.flip_rate.push_back(t == 0 ? 0.0
                                         : static_cast<double>(flips) / static_cast<double>(t));
    out.theta -= (cfg.eta * sign) * g;
  }
  return out;
}

}  // namespace gradreg
