// Experiment CLI: single runs, sweeps, identity-check suites, flooding traces
// and the matmul cost table.

#include "gradreg/checks.hpp"
#include "gradreg/cost_model.hpp"
#include "gradreg/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

namespace {

using namespace gradreg;

std::unique_ptr<std::ofstream> open_out(const std::string& path) {
  if (path.empty()) return nullptr;
  auto file = std::make_unique<std::ofstream>(path);
  if (!*file) throw std::runtime_error("cannot open output file: " + path);
  return file;
}

void emit(const std::vector<RunRecord>& records, const std::string& out_path,
          const std::string& format) {
  auto file = open_out(out_path);
  std::ostream& os = file ? *file : std::cout;
  if (format == "json") {
    write_json(os, records);
  } else {
    write_csv(os, records);
  }
}

int run_check(const CheckResult& result, const std::string& name) {
  std::cout << (result.passed ? "PASS" : "FAIL") << " " << name << ": " << result.detail
            << std::endl;
  return result.passed ? 0 : 1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gradient-regularization experiments on diagonal linear networks"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  std::string format = "csv";
  std::uint64_t seed_override = 0;
  bool seed_given = false;
  int threads = 0;
  std::string method_override;
  double eps_override = -1.0, gamma_override = -1.0;

  auto* run_cmd = app.add_subcommand("dln-run", "Single training run");
  run_cmd->add_option("--config", config_path, "JSON config file")->required();
  run_cmd->add_option("--seed", seed_override, "Seed override")->each([&](const std::string&) {
    seed_given = true;
  });
  run_cmd->add_option("--out", out_path, "Output path (default stdout)");
  run_cmd->add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  run_cmd->add_option("--method", method_override, "Override grid method (none|fgr|bgr|db)");
  run_cmd->add_option("--epsilon", eps_override, "Override ascent step");
  run_cmd->add_option("--gamma", gamma_override, "Override regularization coefficient");

  auto* sweep_cmd = app.add_subcommand("dln-sweep", "Grid x seeds sweep");
  sweep_cmd->add_option("--config", config_path, "JSON config file")->required();
  sweep_cmd->add_option("--out", out_path, "Output path (default stdout)");
  sweep_cmd->add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  sweep_cmd->add_option("--threads", threads, "Worker threads (0 = hardware)");

  auto* check_cmd = app.add_subcommand("check", "Exact-identity suites");
  check_cmd->require_subcommand(1);
  int trials = 20;
  auto* lin_cmd = check_cmd->add_subcommand("linear-invariance",
                                            "Ascent-step invariance on linear models");
  lin_cmd->add_option("--trials", trials, "Number of random instances");
  auto* flood_id_cmd =
      check_cmd->add_subcommand("flooding-identity", "Two-step flooding vs finite-difference GR");
  auto* sam_cmd = check_cmd->add_subcommand("sam-identity", "Unnormalized SAM vs GD with F-GR");

  auto* flood_cmd = app.add_subcommand("flooding-demo", "Per-step flooding trace");
  flood_cmd->add_option("--config", config_path, "JSON config file")->required();
  flood_cmd->add_option("--out", out_path, "Trace CSV path")->required();
  flood_cmd->add_option("--seed", seed_override, "Seed override")->each([&](const std::string&) {
    seed_given = true;
  });

  auto* cost_cmd = app.add_subcommand("cost-model", "Matmul counts per depth");
  std::vector<int> depths;
  cost_cmd->add_option("--depths", depths, "Network depths")->required()->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      ExperimentConfig cfg = load_config_file(config_path);
      MethodSpec spec;
      if (!method_override.empty()) {
        spec.method = gr_method_from_name(method_override, eps_override > 0 ? eps_override : 0.0);
        spec.gamma = gamma_override >= 0 ? gamma_override : 0.0;
      } else {
        if (cfg.grid.empty()) {
          throw std::runtime_error("dln-run: config has no grid entry and no --method override");
        }
        spec = cfg.grid.front();
        if (eps_override > 0) {
          spec.method = gr_method_from_name(spec.method.name(), eps_override);
        }
        if (gamma_override >= 0) spec.gamma = gamma_override;
      }
      const std::uint64_t seed = seed_given ? seed_override : cfg.seed;
      const RunRecord rec = run_experiment(cfg, spec.method, spec.gamma, seed);
      emit({rec}, out_path, format);
      return 0;
    }
    if (*sweep_cmd) {
      ExperimentConfig cfg = load_config_file(config_path);
      if (cfg.grid.empty()) throw std::runtime_error("dln-sweep: config grid is empty");
      const auto records = sweep(cfg, cfg.grid, seed_list(cfg.seed, cfg.n_seeds), threads);
      emit(records, out_path, format);
      return 0;
    }
    if (*lin_cmd) return run_check(check_linear_invariance(trials), "linear-invariance");
    if (*flood_id_cmd) return run_check(check_flooding_identity(), "flooding-identity");
    if (*sam_cmd) return run_check(check_sam_identity(), "sam-identity");
    if (*flood_cmd) {
      const std::string text = slurp(config_path);
      ExperimentConfig cfg = parse_config(text);
      const FloodDemoConfig demo = parse_flood_config(text);
      if (!demo.present) {
        throw std::runtime_error("flooding-demo: config needs a \"flood\" section");
      }
      const std::uint64_t seed = seed_given ? seed_override : cfg.seed;
      const SparseRegression data = generate_sparse_regression(cfg, seed);
      const DlnInit init = init_dln_weights(cfg.d, cfg.alpha0_std, seed);
      const DlnObjective obj(data.train_data);
      const FloodResult result = flooding_train(obj, init.w0, demo.flood);
      auto file = open_out(out_path);
      write_flood_trace_csv(file ? *file : std::cout, result.trace);
      return 0;
    }
    if (*cost_cmd) {
      std::cout << "depth,plain_grad,fgr,bgr,db,db_over_fgr\n";
      for (const CostReport& rep : cost_report(depths)) {
        std::cout << rep.depth << ',' << rep.plain_grad << ',' << rep.fgr << ',' << rep.bgr
                  << ',' << rep.db << ',' << rep.db_over_fgr << '\n';
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  }
  return 0;
}
