#include "gradreg/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace gradreg {

namespace {

constexpr double kLabelNoiseStd = 0.1;  // label noise variance 0.01

double median(Vector v) {
  if (v.size() == 0) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.data(), v.data() + v.size());
  const Index m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (d < 1 || n < 1) throw std::invalid_argument("ExperimentConfig: d and n must be >= 1");
  if (n_test < 1) throw std::invalid_argument("ExperimentConfig: n_test must be >= 1");
  if (k_star < 1 || k_star > d) {
    throw std::invalid_argument("ExperimentConfig: need 1 <= k_star <= d");
  }
  if (!(sigma2 > 0.0)) throw std::invalid_argument("ExperimentConfig: sigma2 must be > 0");
  if (!(alpha0_std > 0.0)) throw std::invalid_argument("ExperimentConfig: alpha0_std must be > 0");
  if (n_seeds < 1) throw std::invalid_argument("ExperimentConfig: n_seeds must be >= 1");
  train.validate();
}

ExperimentConfig default_experiment_config() {
  ExperimentConfig cfg;
  cfg.train.eta = 1e-3;
  cfg.train.loss_tol = 1e-8;
  cfg.train.explode_threshold = 1e6;
  cfg.train.max_steps = 8000000;
  return cfg;
}

SparseRegression generate_sparse_regression(const ExperimentConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(derive_seed(seed, 0));
  const double sigma = std::sqrt(cfg.sigma2);

  GroundTruth truth;
  truth.k_star = cfg.k_star;
  truth.mu = cfg.mu;
  truth.sigma2 = cfg.sigma2;
  truth.beta_star = Vector::Zero(cfg.d);
  truth.beta_star.head(cfg.k_star).setConstant(1.0 / std::sqrt(static_cast<double>(cfg.k_star)));

  const auto draw = [&](int rows) {
    Matrix x(rows, cfg.d);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cfg.d; ++j) {
        x(i, j) = rng.normal(cfg.mu, sigma);
      }
    }
    Vector y = x * truth.beta_star;
    for (int i = 0; i < rows; ++i) {
      y[i] += rng.normal(0.0, kLabelNoiseStd);
    }
    return Dataset(std::move(x), std::move(y));
  };

  Dataset train_data = draw(cfg.n);
  Dataset test_data = draw(cfg.n_test);
  return {std::move(train_data), std::move(test_data), std::move(truth)};
}

DlnInit init_dln_weights(Index d, double alpha0_std, std::uint64_t seed) {
  if (!(alpha0_std > 0.0)) {
    throw std::invalid_argument("init_dln_weights: alpha0_std must be > 0");
  }
  Rng rng(derive_seed(seed, 1));
  Vector alpha0(d);
  for (Index i = 0; i < d; ++i) {
    do {
      alpha0[i] = rng.normal(0.0, alpha0_std);
    } while (std::abs(alpha0[i]) < 1e-12);
  }
  Vector w0(2 * d);
  w0.head(d) = alpha0;
  w0.tail(d) = alpha0;
  return {std::move(w0), AlphaVector(alpha0.cwiseAbs())};
}

double test_loss(const Vector& beta, const Dataset& test) {
  check_dim(beta, test.dim(), "test_loss");
  if (test.n_samples() == 0) {
    throw std::invalid_argument("test_loss: empty test set");
  }
  return (test.X * beta - test.y).squaredNorm() / static_cast<double>(test.n_samples());
}

RunRecord run_experiment(const ExperimentConfig& cfg, const GrMethod& method, double gamma,
                         std::uint64_t seed) {
  const SparseRegression data = generate_sparse_regression(cfg, seed);
  const DlnInit init = init_dln_weights(cfg.d, cfg.alpha0_std, seed);
  const DlnObjective obj(data.train_data);

  TrainConfig train_cfg = cfg.train;
  train_cfg.gr = GrConfig{method, gamma};
  const GdResult result = gd_train(obj, init.w0, train_cfg);

  RunRecord rec;
  rec.method = method.name();
  rec.epsilon = method.epsilon;
  rec.gamma = gamma;
  rec.seed = seed;
  rec.status = result.status;
  rec.steps = result.status.step;
  rec.final_train_loss = result.final_loss;
  rec.alpha0 = init.alpha0.values;
  rec.exponents = ExponentReport::from_run(data.train_data, beta_from_w(init.w0), result.acc);
  rec.psi_hat = result.acc.psi;

  const auto n = static_cast<double>(cfg.n);
  const Vector nb0_half = 0.5 * n * rec.exponents.b0_squared;
  rec.psi1_rel_err =
      median((rec.exponents.psi1_hat - nb0_half).cwiseAbs().cwiseQuotient(nb0_half));

  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (result.status.exploded()) {
    rec.test_loss = nan;
    rec.l1_norm = nan;
    rec.max_alpha_gr = nan;
    rec.lambda_max = nan;
    return rec;
  }

  rec.beta = beta_from_w(result.w);
  rec.test_loss = gradreg::test_loss(rec.beta, data.test_data);
  rec.l1_norm = rec.beta.lpNorm<1>();
  const AlphaVector alpha_gr = alpha_gr_from_weights(result.w);
  rec.alpha_gr = alpha_gr.values;
  rec.max_alpha_gr = alpha_gr.values.maxCoeff();
  rec.lambda_max = dln_hessian_top_eig(obj, result.w, 1e-10, 20000, derive_seed(seed, 2));
  return rec;
}

std::vector<std::uint64_t> seed_list(std::uint64_t base, int count) {
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) seeds[static_cast<std::size_t>(i)] = base + static_cast<std::uint64_t>(i);
  return seeds;
}

std::vector<RunRecord> sweep(const ExperimentConfig& cfg, const std::vector<MethodSpec>& grid,
                             const std::vector<std::uint64_t>& seeds, int threads) {
  if (grid.empty() || seeds.empty()) {
    throw std::invalid_argument("sweep: grid and seed list must be non-empty");
  }
  const std::size_t total = grid.size() * seeds.size();
  std::vector<RunRecord> records(total);

  unsigned workers = threads > 0 ? static_cast<unsigned>(threads)
                                 : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(total));

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const auto worker = [&]() {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= total) return;
      const MethodSpec& spec = grid[idx / seeds.size()];
      const std::uint64_t seed = seeds[idx % seeds.size()];
      try {
        records[idx] = run_experiment(cfg, spec.method, spec.gamma, seed);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return records;
}

void write_csv(std::ostream& os, const std::vector<RunRecord>& records) {
  os << "method,epsilon,gamma,seed,status,steps,final_train_loss,test_loss,l1_norm,"
        "max_alpha_gr,c0_hat_mean,c1_mean,c2_hat_mean,psi1_rel_err,lambda_max\n";
  for (const RunRecord& r : records) {
    os << r.method << ',' << fmt17(r.epsilon) << ',' << fmt17(r.gamma) << ',' << r.seed << ','
       << r.status.name() << ',' << r.steps << ',' << fmt17(r.final_train_loss) << ','
       << fmt17(r.test_loss) << ',' << fmt17(r.l1_norm) << ',' << fmt17(r.max_alpha_gr) << ','
       << fmt17(r.exponents.c0_hat.mean()) << ',' << fmt17(r.exponents.c1.mean()) << ','
       << fmt17(r.exponents.c2_hat.mean()) << ',' << fmt17(r.psi1_rel_err) << ','
       << fmt17(r.lambda_max) << '\n';
  }
}

namespace {

nlohmann::json vec_to_json(const Vector& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

nlohmann::json record_to_json(const RunRecord& r) {
  nlohmann::json j;
  j["method"] = r.method;
  j["epsilon"] = r.epsilon;
  j["gamma"] = r.gamma;
  j["seed"] = r.seed;
  j["status"] = r.status.name();
  j["steps"] = r.steps;
  j["final_train_loss"] = r.final_train_loss;
  j["test_loss"] = r.test_loss;
  j["l1_norm"] = r.l1_norm;
  j["max_alpha_gr"] = r.max_alpha_gr;
  j["lambda_max"] = r.lambda_max;
  j["psi1_rel_err"] = r.psi1_rel_err;
  j["psi_hat"] = vec_to_json(r.psi_hat);
  j["alpha0"] = vec_to_json(r.alpha0);
  j["alpha_gr"] = vec_to_json(r.alpha_gr);
  j["beta"] = vec_to_json(r.beta);
  j["c0_hat"] = vec_to_json(r.exponents.c0_hat);
  j["c1"] = vec_to_json(r.exponents.c1);
  j["c2_hat"] = vec_to_json(r.exponents.c2_hat);
  j["psi1_hat"] = vec_to_json(r.exponents.psi1_hat);
  j["b0_squared"] = vec_to_json(r.exponents.b0_squared);
  return j;
}

// NaN/Inf are not representable in JSON; serialize as null.
void sanitize(nlohmann::json& j) {
  if (j.is_number_float() && !std::isfinite(j.get<double>())) {
    j = nullptr;
    return;
  }
  if (j.is_object() || j.is_array()) {
    for (auto& item : j) sanitize(item);
  }
}

}  // namespace

void write_json(std::ostream& os, const std::vector<RunRecord>& records) {
  nlohmann::json j;
  j["records"] = nlohmann::json::array();
  for (const RunRecord& r : records) j["records"].push_back(record_to_json(r));
  sanitize(j);
  os << j.dump(2) << '\n';
}

namespace {

void reject_unknown_keys(const nlohmann::json& obj, std::initializer_list<const char*> known,
                         const char* where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool found = false;
    for (const char* k : known) {
      if (it.key() == k) {
        found = true;
        break;
      }
    }
    if (!found) {
      throw std::invalid_argument(std::string("config: unknown key '") + it.key() + "' in " +
                                  where);
    }
  }
}

MethodSpec parse_method_spec(const nlohmann::json& j) {
  reject_unknown_keys(j, {"method", "epsilon", "gamma"}, "grid entry");
  const std::string name = j.at("method").get<std::string>();
  const double eps = j.value("epsilon", 0.0);
  MethodSpec spec;
  spec.method = gr_method_from_name(name, eps);
  spec.gamma = j.value("gamma", 0.0);
  return spec;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  const nlohmann::json j = nlohmann::json::parse(json_text);
  reject_unknown_keys(j,
                      {"d", "n", "n_test", "k_star", "mu", "sigma2", "alpha0_std", "seed",
                       "n_seeds", "train", "grid", "flood"},
                      "top level");
  ExperimentConfig cfg = default_experiment_config();
  cfg.d = j.value("d", cfg.d);
  cfg.n = j.value("n", cfg.n);
  cfg.n_test = j.value("n_test", cfg.n_test);
  cfg.k_star = j.value("k_star", cfg.k_star);
  cfg.mu = j.value("mu", cfg.mu);
  cfg.sigma2 = j.value("sigma2", cfg.sigma2);
  cfg.alpha0_std = j.value("alpha0_std", cfg.alpha0_std);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.n_seeds = j.value("n_seeds", cfg.n_seeds);
  if (j.contains("train")) {
    const nlohmann::json& t = j.at("train");
    reject_unknown_keys(t, {"eta", "max_steps", "loss_tol", "explode_threshold"}, "train");
    cfg.train.eta = t.value("eta", cfg.train.eta);
    cfg.train.max_steps = t.value("max_steps", cfg.train.max_steps);
    cfg.train.loss_tol = t.value("loss_tol", cfg.train.loss_tol);
    cfg.train.explode_threshold = t.value("explode_threshold", cfg.train.explode_threshold);
  }
  if (j.contains("grid")) {
    for (const auto& entry : j.at("grid")) {
      cfg.grid.push_back(parse_method_spec(entry));
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

FloodDemoConfig parse_flood_config(const std::string& json_text) {
  const nlohmann::json j = nlohmann::json::parse(json_text);
  FloodDemoConfig out;
  if (!j.contains("flood")) return out;
  const nlohmann::json& f = j.at("flood");
  reject_unknown_keys(f, {"flood_level", "eta", "max_steps"}, "flood");
  out.flood.flood_level = f.at("flood_level").get<double>();
  out.flood.eta = f.value("eta", 1e-3);
  out.flood.max_steps = f.value("max_steps", 100000L);
  out.flood.validate();
  out.present = true;
  return out;
}

void write_flood_trace_csv(std::ostream& os, const FloodTrace& trace) {
  os << "step,loss,grad_sq_norm,flip_rate\n";
  for (std::size_t t = 0; t < trace.loss.size(); ++t) {
    os << t << ',' << fmt17(trace.loss[t]) << ',' << fmt17(trace.grad_sq_norm[t]) << ','
       << fmt17(trace.flip_rate[t]) << '\n';
  }
}

Prop44Diagnostic prop44_bound_check(const RunRecord& rec) {
  if (rec.alpha_gr.size() == 0) {
    throw std::invalid_argument("prop44_bound_check: record has no alpha_gr (exploded run?)");
  }
  return prop44_check(AlphaVector(rec.alpha0), AlphaVector(rec.alpha_gr), rec.exponents.c1,
                      rec.gamma, GrMethod{rec.method == "fgr"  ? GrKind::ForwardFD
                                          : rec.method == "bgr" ? GrKind::BackwardFD
                                                                : GrKind::None,
                                          rec.epsilon}
                          .signed_epsilon());
}

}  // namespace gradreg
