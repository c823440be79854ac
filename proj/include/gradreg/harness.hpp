#pragma once

#include "gradreg/dln_theory.hpp"
#include "gradreg/rng.hpp"
#include "gradreg/trainers.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gradreg {

/// k*-sparse ground truth: the first k_star coordinates equal 1/sqrt(k_star),
/// so ||beta_star||_2 = 1.
struct GroundTruth {
  Vector beta_star;
  int k_star = 0;
  double mu = 0.0;
  double sigma2 = 0.0;
};

struct MethodSpec {
  GrMethod method;
  double gamma = 0.0;
};

struct ExperimentConfig {
  int d = 100;
  int n = 50;
  int n_test = 1000;
  int k_star = 5;
  double mu = 5.0;
  double sigma2 = 5.0;
  double alpha0_std = 0.1;  // std of the N(0, alpha0_std^2) init draws
  std::uint64_t seed = 1;
  int n_seeds = 10;
  TrainConfig train;  // gr is filled per run from the grid
  std::vector<MethodSpec> grid;

  void validate() const;
};

ExperimentConfig default_experiment_config();

struct SparseRegression {
  Dataset train_data;
  Dataset test_data;
  GroundTruth truth;
};

/// Synthetic sparse regression, x ~ N(mu 1, sigma2 I), y ~ N(<beta*, x>, 0.01).
/// Deterministic given the seed: the stream is derive_seed(seed, 0), drawing
/// train X row-major, train label noise, test X row-major, test label noise.
SparseRegression generate_sparse_regression(const ExperimentConfig& cfg, std::uint64_t seed);

struct DlnInit {
  Vector w0;          // stacked (alpha0, alpha0), signed entries
  AlphaVector alpha0; // |alpha0| (the theory depends on alpha only through alpha^2)
};

/// alpha0_i ~ N(0, alpha0_std^2) on stream derive_seed(seed, 1); entries with
/// |alpha0_i| < 1e-12 are redrawn so every entry is non-zero.
DlnInit init_dln_weights(Index d, double alpha0_std, std::uint64_t seed);

/// Mean squared prediction error of beta on held-out data.
double test_loss(const Vector& beta, const Dataset& test);

struct RunRecord {
  std::string method;
  double epsilon = 0.0;
  double gamma = 0.0;
  std::uint64_t seed = 0;
  TrainStatus status;
  long steps = 0;
  double final_train_loss = 0.0;
  double test_loss = 0.0;
  double l1_norm = 0.0;
  double max_alpha_gr = 0.0;
  double lambda_max = 0.0;
  double psi1_rel_err = 0.0;  // median_i |psi1_i - n b0_i^2/2| / (n b0_i^2/2)
  ExponentReport exponents;
  Vector psi_hat;   // raw Psi accumulator, for the Eq.-of-motion cross-check
  Vector alpha0;
  Vector alpha_gr;  // empty when the run exploded
  Vector beta;      // final predictor (empty when exploded)
};

/// Full single-run protocol: generate data, initialize, train, evaluate.
/// All randomness derives from `seed`; identical inputs give a bit-identical
/// record. Explosions are recorded in the status, not raised.
RunRecord run_experiment(const ExperimentConfig& cfg, const GrMethod& method, double gamma,
                         std::uint64_t seed);

/// seeds {base, base+1, ..., base+count-1}.
std::vector<std::uint64_t> seed_list(std::uint64_t base, int count);

/// One record per (grid entry, seed), emitted in grid-major order. Runs are
/// independent and execute on `threads` workers (0 = hardware concurrency).
std::vector<RunRecord> sweep(const ExperimentConfig& cfg, const std::vector<MethodSpec>& grid,
                             const std::vector<std::uint64_t>& seeds, int threads = 0);

/// Fixed-column CSV, one row per run, floats at 17 significant digits.
void write_csv(std::ostream& os, const std::vector<RunRecord>& records);

/// JSON with the full per-coordinate vectors.
void write_json(std::ostream& os, const std::vector<RunRecord>& records);

/// Parses an ExperimentConfig from JSON text; unknown keys are rejected.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);

/// Optional flooding section of a config file.
struct FloodDemoConfig {
  FloodConfig flood;
  bool present = false;
};
FloodDemoConfig parse_flood_config(const std::string& json_text);

/// Per-step flooding trace as CSV (step, loss, grad_sq_norm, flip_rate).
void write_flood_trace_csv(std::ostream& os, const FloodTrace& trace);

Prop44Diagnostic prop44_bound_check(const RunRecord& rec);

}  // namespace gradreg
