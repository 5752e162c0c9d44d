// Command-line front end: run ensembles, the scenario matrix, and the
// spin-up calibration check.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "lmsim/config.hpp"
#include "lmsim/engine.hpp"
#include "lmsim/error.hpp"
#include "lmsim/output.hpp"

namespace {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kBadConfig = 2,
  kDegenerateHistory = 3,
  kIoFailure = 4,
  kCalibrationFailed = 5,
};

std::string key_reference() {
  std::ostringstream o;
  o << "Configuration keys (flat file, '[section]' headers, 'key = value' lines):\n";
  std::string_view section;
  for (const auto& k : lmsim::config_keys()) {
    if (k.section != section) {
      section = k.section;
      o << "  [" << section << "]\n";
    }
    o << "    " << k.key << " (default " << k.default_value << "): " << k.help << "\n";
  }
  o << "\nExit codes: 0 ok, 1 failure, 2 bad config or arguments, 3 degenerate spin-up\n"
       "history, 4 I/O error, 5 calibrate-check failed.\n";
  return o.str();
}

lmsim::LoadedConfig load(const std::string& path) {
  if (path.empty()) return {lmsim::parse_config(""), ""};
  return lmsim::load_config(path);
}

unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

void run_and_write(const lmsim::SimulationConfig& config, std::string_view source,
                   const std::filesystem::path& out, unsigned threads) {
  const auto start = std::chrono::steady_clock::now();
  const auto ensemble = lmsim::run_ensemble(config, threads);
  lmsim::RunManifest manifest;
  manifest.config_fingerprint = lmsim::fingerprint(config);
  manifest.base_seed = config.base_seed;
  for (const auto& r : ensemble.runs) {
    manifest.seeds.push_back(r.seed);
    for (const auto& d : r.diagnostics) {
      manifest.diagnostics.push_back("seed " + std::to_string(r.seed) + ": " + d);
    }
  }
  manifest.wall_clock = std::chrono::steady_clock::now() - start;
  lmsim::write_outputs(out, ensemble, manifest, config, source);
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const lmsim::DegenerateHistory& e) {
    std::cerr << "error: degenerate history: " << e.what() << "\n";
    return kDegenerateHistory;
  } catch (const lmsim::ParseError& e) {
    std::cerr << "error: config " << e.what() << "\n";
    return kBadConfig;
  } catch (const lmsim::ValidationError& e) {
    std::cerr << "error: invalid config: " << e.what() << "\n";
    return kBadConfig;
  } catch (const lmsim::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Agent-based labor market simulator with a data-driven employment service"};
  app.footer(key_reference());
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  unsigned threads = default_threads();

  auto* run_cmd = app.add_subcommand("run", "Run one ensemble and write its CSVs");
  run_cmd->add_option("--config", config_path, "Configuration file (defaults if omitted)");
  run_cmd->add_option("--out", out_dir, "Output directory")->required();
  run_cmd->add_option("--seed", seed, "Override engine.base_seed");
  run_cmd->add_option("--runs", runs, "Override engine.n_runs")->check(CLI::PositiveNumber);
  run_cmd->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* matrix_cmd = app.add_subcommand(
      "matrix", "Run {full, base} x {unbiased, biased} x 4 scenarios, one directory per cell");
  matrix_cmd->add_option("--config", config_path, "Configuration file (defaults if omitted)");
  matrix_cmd->add_option("--out", out_dir, "Output root directory")->required();
  matrix_cmd->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* calib_cmd = app.add_subcommand(
      "calibrate-check", "Run spin-up only and check label balance and t_u_max against T_u");
  calib_cmd->add_option("--config", config_path, "Configuration file (defaults if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadConfig;
  }

  if (*run_cmd) {
    return guarded([&] {
      auto loaded = load(config_path);
      if (seed) loaded.config.base_seed = *seed;
      if (runs) loaded.config.n_runs = *runs;
      loaded.config.validate();
      run_and_write(loaded.config, loaded.source, out_dir, threads);
      return kOk;
    });
  }

  if (*matrix_cmd) {
    return guarded([&] {
      const auto loaded = load(config_path);
      const std::filesystem::path root = out_dir;
      for (auto variant : {lmsim::Variant::Full, lmsim::Variant::Base}) {
        for (double beta_b : {0.0, 2.0}) {
          for (auto name : {lmsim::ScenarioName::Balanced, lmsim::ScenarioName::OnlyLow,
                            lmsim::ScenarioName::OnlyHigh,
                            lmsim::ScenarioName::BalancedErrorsPenalized}) {
            auto cell = loaded.config;
            cell.model_variant = variant;
            cell.market.beta_b = beta_b;
            cell.scenario = lmsim::ScenarioConfig::named(name, loaded.config.scenario.k_scale);
            const std::string dir = std::string(lmsim::to_string(variant)) + "_" +
                                    (beta_b == 0.0 ? "unbiased" : "biased") + "_" +
                                    std::string(lmsim::to_string(name));
            std::cerr << "matrix: " << dir << "\n";
            run_and_write(cell, loaded.source, root / dir, threads);
          }
        }
      }
      return kOk;
    });
  }

  return guarded([&] {
    const auto loaded = load(config_path);
    const auto rep = lmsim::calibrate_check(loaded.config);
    std::printf("spin-up spells:        %zu (over %d runs)\n", rep.spells, loaded.config.n_runs);
    std::printf("label balance (Low):   %.4f  [0.4, 0.6]  %s\n", rep.low_fraction,
                rep.label_balance_ok ? "pass" : "FAIL");
    std::printf("median T_u:            %.1f\n", rep.median_t_u);
    std::printf("t_u_max / median T_u:  %.2f  [3, 5]  %s\n", rep.t_u_max_ratio,
                rep.t_u_max_ok ? "pass" : "FAIL");
    return rep.ok() ? kOk : kCalibrationFailed;
  });
}
