#include "lmsim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <cmath>
#include <thread>

#include "lmsim/config.hpp"
#include "lmsim/error.hpp"

namespace lmsim {

void SimulationConfig::validate() const {
  population.validate();
  market.validate();
  intervention.validate(population);
  scenario.validate();
  fit.validate();
  if (model_variant == Variant::RealProspect) {
    throw ValidationError("engine.model_variant must be full or base");
  }
  if (pool_size < 10) throw ValidationError("engine.pool_size must be >= 10");
  if (spinup_discard < 0) throw ValidationError("engine.spinup_discard must be >= 0");
  if (!(spinup_discard < spinup_steps)) {
    throw ValidationError("engine.spinup_discard must be < engine.spinup_steps");
  }
  if (!(spinup_steps <= total_steps)) {
    throw ValidationError("engine.spinup_steps must be <= engine.total_steps");
  }
  if (refit_every < 1) throw ValidationError("engine.refit_every must be >= 1");
  if (n_runs < 1) throw ValidationError("engine.n_runs must be >= 1");
}

namespace {

void replenish(SimState& state, const SimulationConfig& config) {
  while (state.pool_count() < static_cast<std::size_t>(config.pool_size)) {
    Individual ind = sample_individual(state.rng, config.population);
    ind.id = state.next_id++;
    state.active.push_back(ind);
    ++state.entrants;
  }
}

// Market phase then forced exits. Hires are appended to the report; they
// enter the history only when `keep_history` holds.
void market_phase(SimState& state, const SimulationConfig& config, StepReport& report,
                  bool keep_history) {
  std::vector<Individual> remaining;
  remaining.reserve(state.active.size());
  for (auto& ind : state.active) {
    const double p = job_probability(config.market, ind.s_real(), ind.x_pr);
    if (draw_hire(state.rng, p)) {
      report.hires.push_back({ind.x1, ind.x_pr, ind.s_real(), ind.t_unemployed + 1});
    } else {
      ++ind.t_unemployed;
      remaining.push_back(ind);
    }
  }
  state.hires += static_cast<long>(report.hires.size());
  if (keep_history) state.history.insert(state.history.end(), report.hires.begin(), report.hires.end());

  const auto forced = std::remove_if(remaining.begin(), remaining.end(), [&](const Individual& ind) {
    return ind.t_unemployed >= config.intervention.t_u_max;
  });
  report.forced_exits = static_cast<int>(remaining.end() - forced);
  state.forced_exits += report.forced_exits;
  remaining.erase(forced, remaining.end());
  state.active = std::move(remaining);
}

void waiting_countdown(SimState& state) {
  std::vector<Individual> still_waiting;
  still_waiting.reserve(state.waiting.size());
  for (auto& ind : state.waiting) {
    --ind.wait_remaining;
    ++ind.t_unemployed;
    if (ind.wait_remaining == 0) {
      state.active.push_back(ind);
    } else {
      still_waiting.push_back(ind);
    }
  }
  state.waiting = std::move(still_waiting);
}

void pes_phase(SimState& state, const SimulationConfig& config, StepReport& report) {
  const auto& pred = *state.pred_model;
  const auto& real = *state.real_model;
  const auto& iv = config.intervention;

  report.classified = state.active;
  report.predictions.reserve(state.active.size());
  std::vector<Individual> staying;
  staying.reserve(state.active.size());
  for (auto& ind : state.active) {
    const auto predicted = predict_class(pred, ind);
    const auto truth = real_class(real, ind);
    report.predictions.push_back({predicted, truth, ind.x_pr});
    const double k = k_lookup(config.scenario, truth, predicted);
    if (predicted == ProspectClass::High) {
      staying.push_back(apply_help(ind, k, iv, 1));
      continue;
    }
    Individual helped = apply_help(ind, k, iv, iv.delta_t_u + 1);
    if (iv.delta_t_u > 0) {
      helped.wait_remaining = iv.delta_t_u;
      state.waiting.push_back(helped);
    } else {
      staying.push_back(helped);
    }
  }
  state.active = std::move(staying);

  report.cf_fraction = counterfactual_fraction(pred, report.classified, real);
  report.eo = equal_opportunity(report.predictions);
}

// Returns false and leaves the models untouched when the history cannot be fit.
bool refit_models(SimState& state, const SimulationConfig& config) {
  try {
    const LogisticModel* pred_start = state.pred_model ? &*state.pred_model : nullptr;
    const LogisticModel* real_start = state.real_model ? &*state.real_model : nullptr;
    auto pred = fit_prediction(state.history, config.model_variant,
                               config.intervention.t_u_threshold, config.fit, pred_start);
    auto real = fit_real_prospect(state.history, config.intervention.t_u_threshold, config.fit,
                                  real_start);
    if (!pred.converged) ++state.fit_warnings;
    if (!real.converged) ++state.fit_warnings;
    state.pred_model = std::move(pred.model);
    state.real_model = std::move(real.model);
    state.history_at_last_fit = state.history.size();
    return true;
  } catch (const DegenerateHistory&) {
    return false;
  }
}

SimState warm_up(const SimulationConfig& config, Rng rng, const StepObserver& observer) {
  SimState state;
  state.rng = std::move(rng);
  replenish(state, config);
  while (state.t < config.spinup_steps) {
    ++state.t;
    StepReport report;
    report.t = state.t;
    waiting_countdown(state);
    market_phase(state, config, report, state.t > config.spinup_discard);
    replenish(state, config);
    if (observer) observer(state, report);
  }
  return state;
}

}  // namespace

SimState spin_up(const SimulationConfig& config, Rng rng, const StepObserver& observer) {
  SimState state = warm_up(config, std::move(rng), observer);
  const auto threshold = config.intervention.t_u_threshold;
  const auto lows = std::count_if(state.history.begin(), state.history.end(),
                                  [&](const HistoryRecord& r) { return r.t_u > threshold; });
  if (state.history.size() < 2 || lows == 0 || lows == static_cast<long>(state.history.size())) {
    throw DegenerateHistory("spin-up history has " + std::to_string(state.history.size()) +
                            " spells, " + std::to_string(lows) + " above t_u_threshold " +
                            std::to_string(threshold) + "; market parameters are miscalibrated");
  }
  if (!refit_models(state, config)) {
    throw DegenerateHistory("spin-up history could not be fit");
  }
  return state;
}

StepReport step(SimState& state, const SimulationConfig& config) {
  ++state.t;
  StepReport report;
  report.t = state.t;
  report.pes_active = true;

  waiting_countdown(state);
  market_phase(state, config, report, true);
  pes_phase(state, config, report);
  replenish(state, config);

  if (state.t % config.refit_every == 0 && state.history.size() > state.history_at_last_fit) {
    report.refit = refit_models(state, config);
  }
  return report;
}

MetricsRow snapshot_metrics(const SimState& state, const StepReport& report) {
  MetricsRow row;
  row.t = report.t;
  std::vector<Individual> pool;
  pool.reserve(state.pool_count());
  pool.insert(pool.end(), state.active.begin(), state.active.end());
  pool.insert(pool.end(), state.waiting.begin(), state.waiting.end());
  row.bgsd = bgsd(pool);
  if (row.bgsd) row.bgsd_abs = std::abs(*row.bgsd);
  auxiliary_metrics(state.active, state.waiting, report.hires, row);
  if (report.pes_active) {
    row.cf_fraction = report.cf_fraction;
    row.eo = report.eo;
  }
  return row;
}

RunOutput run(const SimulationConfig& config, std::uint64_t seed, const StepObserver& observer) {
  config.validate();
  RunOutput out;
  out.seed = seed;
  out.config_fingerprint = fingerprint(config);
  out.rows.reserve(static_cast<std::size_t>(config.total_steps - config.spinup_discard));

  auto record = [&](const SimState& state, const StepReport& report) {
    if (observer) observer(state, report);
    if (report.t <= config.spinup_discard) return;
    out.rows.push_back(snapshot_metrics(state, report));
    if (state.pred_model) out.coefficients.push_back({report.t, *state.pred_model});
    if (state.real_model) out.coefficients.push_back({report.t, *state.real_model});
  };

  SimState state = spin_up(config, make_rng(seed), record);
  while (state.t < config.total_steps) {
    const StepReport report = step(state, config);
    record(state, report);
  }

  if (state.fit_warnings > 0) {
    out.diagnostics.push_back(std::to_string(state.fit_warnings) +
                              " model fits hit fit.max_iter before converging");
  }
  out.entrants = state.entrants;
  out.hires = state.hires;
  out.forced_exits = state.forced_exits;
  return out;
}

std::vector<MetricsRow> average_rows(const std::vector<std::vector<MetricsRow>>& runs) {
  std::vector<MetricsRow> mean;
  if (runs.empty()) return mean;
  const std::size_t steps = runs.front().size();
  for (const auto& r : runs) {
    if (r.size() != steps) throw Error("average_rows: runs have different lengths");
  }
  mean.resize(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    mean[i].t = runs.front()[i].t;
    for (const auto& col : kMetricColumns) {
      double sum = 0.0;
      int count = 0;
      for (const auto& r : runs) {
        if (const auto& v = r[i].*col.field) {
          sum += *v;
          ++count;
        }
      }
      if (count > 0) mean[i].*col.field = sum / count;
    }
  }
  return mean;
}

EnsembleOutput run_ensemble(const SimulationConfig& config, unsigned threads) {
  config.validate();
  const auto n = static_cast<std::size_t>(config.n_runs);
  EnsembleOutput out;
  out.runs.resize(n);
  std::vector<std::exception_ptr> errors(n);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out.runs[i] = run(config, config.base_seed + i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(n));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i]) continue;
    const std::string where = "run " + std::to_string(i) + " (seed " +
                              std::to_string(config.base_seed + i) + "): ";
    try {
      std::rethrow_exception(errors[i]);
    } catch (const DegenerateHistory& e) {
      throw DegenerateHistory(where + e.what());
    } catch (const std::exception& e) {
      throw Error(where + e.what());
    }
  }

  std::vector<std::vector<MetricsRow>> rows;
  rows.reserve(n);
  for (const auto& r : out.runs) rows.push_back(r.rows);
  out.mean = average_rows(rows);
  return out;
}

CalibrationReport calibrate_check(const SimulationConfig& config) {
  config.validate();
  std::vector<int> spells;
  for (int i = 0; i < config.n_runs; ++i) {
    const SimState state =
        warm_up(config, make_rng(config.base_seed + static_cast<std::uint64_t>(i)), {});
    for (const auto& h : state.history) spells.push_back(h.t_u);
  }
  CalibrationReport rep;
  rep.spells = spells.size();
  if (spells.empty()) return rep;
  const auto threshold = config.intervention.t_u_threshold;
  const auto lows = std::count_if(spells.begin(), spells.end(), [&](int t) { return t > threshold; });
  rep.low_fraction = static_cast<double>(lows) / static_cast<double>(spells.size());
  const auto mid = spells.begin() + static_cast<std::ptrdiff_t>(spells.size() / 2);
  std::nth_element(spells.begin(), mid, spells.end());
  rep.median_t_u = *mid;
  rep.t_u_max_ratio = config.intervention.t_u_max / rep.median_t_u;
  rep.label_balance_ok = rep.low_fraction >= 0.4 && rep.low_fraction <= 0.6;
  rep.t_u_max_ok = rep.t_u_max_ratio >= 3.0 && rep.t_u_max_ratio <= 5.0;
  return rep;
}

}  // namespace lmsim
