#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>

#include "helm/reports.hpp"
#include "helm/scenario.hpp"
#include "helm/simulation.hpp"

namespace {

namespace fs = std::filesystem;

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << content;
}

void save_run(const fs::path& dir, const helm::ScenarioConfig& cfg,
              const helm::RunResult& result) {
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "trajectory.csv", std::ios::binary);
    result.log.write_csv(out);
  }
  {
    std::ofstream out(dir / "timing.csv", std::ios::binary);
    helm::write_timing_csv(out, result.step_times);
  }
  write_file(dir / "metrics.json", helm::metrics_to_json(result.metrics).dump(2) + "\n");
  write_file(dir / "config.json", helm::scenario_to_json(cfg).dump(2) + "\n");
}

int report_exit(bool pass) { return pass ? 0 : 1; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"3-DOF vessel simulation with SMC tracking and a projection-based "
               "CBF safety filter"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed_override = 0;
  bool has_seed = false;
  int runs = 10;
  int suite_n = 1000;
  int suite_sweeps = 20;
  double suite_gamma = 1.0;
  std::uint64_t suite_seed = 20240901;

  auto* run_cmd = app.add_subcommand("run", "run one scenario and write logs");
  run_cmd->add_option("config", config_path, "scenario JSON")->required();
  run_cmd->add_option("--out", out_dir, "output directory");
  run_cmd->add_option("--seed", seed_override, "override the scenario seed")
      ->each([&](const std::string&) { has_seed = true; });

  int jobs = 1;
  auto* ens_cmd = app.add_subcommand("ensemble", "run N seeded variants");
  ens_cmd->add_option("config", config_path, "scenario JSON")->required();
  ens_cmd->add_option("--runs", runs, "number of ensemble members");
  ens_cmd->add_option("--out", out_dir, "output directory");
  ens_cmd->add_option("--jobs", jobs, "members to run concurrently");

  auto* t2_cmd = app.add_subcommand("check-t2", "tracking/ultimate-boundedness checks");
  t2_cmd->add_option("config", config_path, "scenario JSON (no obstacles)")->required();
  t2_cmd->add_option("--runs", runs, "disturbed runs in the ensemble");

  auto* t3_cmd = app.add_subcommand("check-t3", "safety/practical-stability checks");
  t3_cmd->add_option("config", config_path, "scenario JSON (with obstacles)")->required();
  t3_cmd->add_option("--runs", runs, "runs in the ensemble");

  auto* cmp_cmd = app.add_subcommand("compare", "projection filter vs exact QP oracle");
  cmp_cmd->add_option("config", config_path, "scenario JSON")->required();
  cmp_cmd->add_option("--runs", runs, "paired runs");

  auto* suite_cmd = app.add_subcommand("oracle-suite",
                                       "projection-vs-QP property suite on random "
                                       "feasible instances");
  suite_cmd->add_option("--n", suite_n, "instance count");
  suite_cmd->add_option("--sweeps", suite_sweeps, "sweep budget for multi-row instances");
  suite_cmd->add_option("--gamma", suite_gamma, "relaxation factor");
  suite_cmd->add_option("--seed", suite_seed, "suite seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      helm::ScenarioConfig cfg = helm::load_scenario(config_path);
      if (has_seed) {
        cfg.seed = seed_override;
        cfg.disturbance.seed = seed_override;
      }
      const helm::RunResult result = helm::run_scenario(cfg);
      save_run(out_dir, cfg, result);
      std::cout << helm::metrics_to_json(result.metrics).dump(2) << "\n";
      return 0;
    }
    if (ens_cmd->parsed()) {
      const helm::ScenarioConfig base = helm::load_scenario(config_path);
      jobs = std::max(1, jobs);
      nlohmann::json summary = nlohmann::json::array();
      // Members are independent (seeds derived from (seed, index)), so they
      // can run concurrently; results are written in index order.
      for (int batch = 0; batch < runs; batch += jobs) {
        std::vector<std::future<helm::RunResult>> pending;
        const int batch_end = std::min(runs, batch + jobs);
        for (int i = batch; i < batch_end; ++i) {
          const helm::ScenarioConfig cfg =
              helm::ensemble_member(base, static_cast<std::uint64_t>(i));
          pending.push_back(std::async(std::launch::async,
                                       [cfg] { return helm::run_scenario(cfg); }));
        }
        for (int i = batch; i < batch_end; ++i) {
          const helm::ScenarioConfig cfg =
              helm::ensemble_member(base, static_cast<std::uint64_t>(i));
          const helm::RunResult result = pending[static_cast<std::size_t>(i - batch)].get();
          save_run(fs::path(out_dir) / ("run" + std::to_string(i)), cfg, result);
          nlohmann::json entry = helm::metrics_to_json(result.metrics);
          entry["seed"] = cfg.seed;
          summary.push_back(entry);
        }
      }
      write_file(fs::path(out_dir) / "summary.json", summary.dump(2) + "\n");
      std::cout << summary.dump(2) << "\n";
      return 0;
    }
    if (t2_cmd->parsed()) {
      const helm::Theorem2Report rep =
          helm::check_theorem2(helm::load_scenario(config_path), runs);
      std::cout << helm::report_to_json(rep).dump(2) << "\n";
      return report_exit(rep.pass);
    }
    if (t3_cmd->parsed()) {
      const helm::Theorem3Report rep =
          helm::check_theorem3(helm::load_scenario(config_path), runs);
      std::cout << helm::report_to_json(rep).dump(2) << "\n";
      return report_exit(rep.pass);
    }
    if (cmp_cmd->parsed()) {
      const helm::CompareReport rep =
          helm::compare_filters(helm::load_scenario(config_path), runs);
      std::cout << helm::report_to_json(rep).dump(2) << "\n";
      return report_exit(rep.pass);
    }
    if (suite_cmd->parsed()) {
      const helm::OracleSuiteReport rep =
          helm::run_oracle_suite(suite_seed, suite_n, suite_sweeps, suite_gamma);
      std::cout << helm::report_to_json(rep).dump(2) << "\n";
      return report_exit(rep.pass);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
