#pragma once

#include "gradreg/gr_methods.hpp"

#include <vector>

namespace gradreg {

enum class TrainOutcome { Converged, MaxSteps, Exploded };

struct TrainStatus {
  TrainOutcome outcome = TrainOutcome::MaxSteps;
  long step = 0;  // steps completed (Converged/MaxSteps) or explosion step

  bool converged() const { return outcome == TrainOutcome::Converged; }
  bool exploded() const { return outcome == TrainOutcome::Exploded; }
  const char* name() const;
};

struct TrainConfig {
  double eta = 1e-3;
  GrConfig gr;
  long max_steps = 1000000;
  double loss_tol = 1e-8;           // stop once L < loss_tol
  double explode_threshold = 1e6;   // Exploded once L > this or non-finite

  void validate() const;
};

/// Left-endpoint Riemann sums of the DLN trajectory integrals, weight eta per
/// step. psi integrates (X^T r*) o (X^T r) with r* evaluated at
/// w* = w + eps grad L(w), eps being the GR method's signed ascent step;
/// psi0/psi1/psi2 integrate b^2, z and z_h (the eps-power decomposition of the
/// psi integrand). b0_squared is (X^T r)^2 at step 0. Empty for non-DLN runs.
struct TrajectoryAccumulators {
  Vector psi, psi0, psi1, psi2, b0_squared;

  bool empty() const { return psi.size() == 0; }
};

struct GdResult {
  Vector w;
  TrainStatus status;
  TrajectoryAccumulators acc;
  double final_loss = 0.0;
};

/// Full-batch gradient descent w <- w - eta * (grad L + gamma DeltaR) until
/// the loss drops below loss_tol, max_steps is reached, or the run explodes
/// (recorded in the status, not thrown). For DLN objectives the trajectory
/// accumulators are filled along the way.
GdResult gd_train(const Objective& obj, const Vector& w0, const TrainConfig& cfg);

/// One explicit GD step with the given GR config (used by the SAM and
/// flooding equivalence checks).
Vector gd_step(const Objective& obj, const Vector& theta, const GrConfig& gr, double eta);

/// Instantaneous integrands (b^2, z, z_h, psi) at w, with
///   b = X^T r, a = w+^2 + w-^2, Z = X^T X,
///   z  = 2 b o (Z (b o a)),
///   z_h = b o (Z (b^2 o beta)),
///   psi = (X^T r*) o b at w* = w + eps grad L(w).
struct StepIntegrands {
  Vector b_squared, z, z_h, psi;
};

StepIntegrands step_integrands(const DlnObjective& obj, const Vector& w, double eps);

struct SamConfig {
  double rho = 0.0;
  bool normalized = true;

  void validate() const;
};

/// SAM update theta - eta grad L(theta') with theta' = theta + eps_t grad L;
/// eps_t = rho / ||grad L|| when normalized, else eps_t = rho. The
/// unnormalized variant coincides bit-for-bit with gd_step under
/// ForwardFD(rho), gamma = rho.
Vector sam_step(const Objective& obj, const Vector& theta, const SamConfig& cfg, double eta);

struct FloodConfig {
  double flood_level = 0.0;  // b > 0
  double eta = 1e-3;
  long max_steps = 1000;

  void validate() const;
};

/// Flooding update theta - eta Sign(L - b) grad L, with Sign(0) := +1.
Vector flooding_step(const Objective& obj, const Vector& theta, const FloodConfig& cfg);

/// Per-step history of a flooding run. flip_rate[t] is the fraction of steps
/// up to and including t whose ascent/descent sign differs from the previous
/// step's.
struct FloodTrace {
  std::vector<double> loss;
  std::vector<double> grad_sq_norm;
  std::vector<double> flip_rate;
};

struct FloodResult {
  Vector theta;
  FloodTrace trace;
};

FloodResult flooding_train(const Objective& obj, const Vector& theta0, const FloodConfig& cfg);

}  // namespace gradreg
