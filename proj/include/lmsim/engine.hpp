#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lmsim/intervention.hpp"
#include "lmsim/labor_market.hpp"
#include "lmsim/metrics.hpp"
#include "lmsim/population.hpp"
#include "lmsim/prediction.hpp"
#include "lmsim/random.hpp"

namespace lmsim {

struct SimulationConfig {
  PopulationParams population;
  MarketParams market;
  InterventionParams intervention;
  ScenarioConfig scenario;
  Variant model_variant = Variant::Full;
  FitOptions fit;
  int pool_size = 400;
  int spinup_steps = 400;
  int spinup_discard = 200;
  int total_steps = 1000;
  int refit_every = 1;
  int n_runs = 10;
  std::uint64_t base_seed = 1;

  void validate() const;
  bool operator==(const SimulationConfig&) const = default;
};

struct SimState {
  int t = 0;
  std::vector<Individual> active;
  std::vector<Individual> waiting;
  std::vector<HistoryRecord> history;
  std::optional<LogisticModel> pred_model;
  std::optional<LogisticModel> real_model;
  Rng rng;
  std::int64_t next_id = 0;

  // Running totals, for the flow balance entrants = hires + forced exits + pool.
  long entrants = 0;
  long hires = 0;
  long forced_exits = 0;
  std::size_t history_at_last_fit = 0;
  long fit_warnings = 0;

  std::size_t pool_count() const { return active.size() + waiting.size(); }
};

/// What happened during one timestep.
struct StepReport {
  int t = 0;
  bool pes_active = false;
  std::vector<HistoryRecord> hires;
  int forced_exits = 0;
  /// Individuals the PES classified, as they were before receiving help.
  std::vector<Individual> classified;
  std::vector<PredictionRecord> predictions;
  std::optional<double> cf_fraction;
  std::optional<double> eo;
  bool refit = false;
};

using StepObserver = std::function<void(const SimState&, const StepReport&)>;

/// Intervention-free warm-up. Keeps the spells completed after
/// spinup_discard as the initial history and fits both models on it.
/// Throws DegenerateHistory when that history cannot be fit.
SimState spin_up(const SimulationConfig& config, Rng rng, const StepObserver& observer = {});

/// One timestep with the PES active: waiting countdown, market, forced
/// exits, PES help, replenishment, refit.
StepReport step(SimState& state, const SimulationConfig& config);

/// Metrics for the state at the end of a step.
MetricsRow snapshot_metrics(const SimState& state, const StepReport& report);

struct CoefficientSnapshot {
  int t = 0;
  LogisticModel model;
};

struct RunOutput {
  std::uint64_t seed = 0;
  std::string config_fingerprint;
  std::vector<MetricsRow> rows;  // t = spinup_discard + 1 .. total_steps
  std::vector<CoefficientSnapshot> coefficients;
  std::vector<std::string> diagnostics;
  long entrants = 0;
  long hires = 0;
  long forced_exits = 0;
};

RunOutput run(const SimulationConfig& config, std::uint64_t seed, const StepObserver& observer = {});

struct EnsembleOutput {
  std::vector<MetricsRow> mean;
  std::vector<RunOutput> runs;  // index i used seed base_seed + i
};

/// Per-timestep mean of each column over the runs in which it is defined.
std::vector<MetricsRow> average_rows(const std::vector<std::vector<MetricsRow>>& runs);

/// n_runs independent runs, optionally on several threads. The result does
/// not depend on the thread count. A failing run aborts the ensemble with
/// its seed in the message.
EnsembleOutput run_ensemble(const SimulationConfig& config, unsigned threads = 1);

struct CalibrationReport {
  std::size_t spells = 0;
  double low_fraction = 0.0;  // share of retained spin-up spells with t_u > t_u_threshold
  double median_t_u = 0.0;
  double t_u_max_ratio = 0.0;  // t_u_max / median_t_u
  bool label_balance_ok = false;
  bool t_u_max_ok = false;
  bool ok() const { return label_balance_ok && t_u_max_ok; }
};

/// Spin-up only, pooled over the configured runs. Label balance must lie in
/// [0.4, 0.6] and t_u_max / median T_u in [3, 5].
CalibrationReport calibrate_check(const SimulationConfig& config);

}  // namespace lmsim
