#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>

#include "lmsim/population.hpp"
#include "lmsim/prediction.hpp"

namespace lmsim {

/// Metric values for one timestep. An empty optional means the quantity is
/// undefined at that step (empty denominator, or the PES is not yet active).
struct MetricsRow {
  int t = 0;
  std::optional<double> bgsd;            // mean s_real of x_pr=0 minus x_pr=1
  std::optional<double> bgsd_abs;
  std::optional<double> cf_fraction;
  std::optional<double> eo;              // TNR_priv - TNR_upriv
  std::optional<double> mean_s_priv;
  std::optional<double> mean_s_upriv;
  std::optional<double> mean_t_u_hires;
  std::optional<double> bgtud_current;   // upriv minus priv mean T_u of this step's hires
  std::optional<double> frac_upriv;
  std::optional<double> frac_waiting_priv;
  std::optional<double> frac_waiting_upriv;
  std::optional<double> n_active;
  std::optional<double> n_waiting;

  bool operator==(const MetricsRow&) const = default;
};

struct MetricColumn {
  std::string_view name;
  std::optional<double> MetricsRow::*field;
};

/// Output column order after the leading "t" column.
inline constexpr std::array<MetricColumn, 13> kMetricColumns{{
    {"bgsd", &MetricsRow::bgsd},
    {"bgsd_abs", &MetricsRow::bgsd_abs},
    {"cf_fraction", &MetricsRow::cf_fraction},
    {"eo", &MetricsRow::eo},
    {"mean_s_priv", &MetricsRow::mean_s_priv},
    {"mean_s_upriv", &MetricsRow::mean_s_upriv},
    {"mean_t_u_hires", &MetricsRow::mean_t_u_hires},
    {"bgtud_current", &MetricsRow::bgtud_current},
    {"frac_upriv", &MetricsRow::frac_upriv},
    {"frac_waiting_priv", &MetricsRow::frac_waiting_priv},
    {"frac_waiting_upriv", &MetricsRow::frac_waiting_upriv},
    {"n_active", &MetricsRow::n_active},
    {"n_waiting", &MetricsRow::n_waiting},
}};

/// Between-group skills difference over a pool; empty if a group is missing.
std::optional<double> bgsd(std::span<const Individual> pool);

/// Among members the model predicts Low: the share that would be predicted
/// High with the opposite x_pr and are truly High under `real_model`.
/// Always 0 for the Base model; empty when nobody is predicted Low.
std::optional<double> counterfactual_fraction(const LogisticModel& model,
                                              std::span<const Individual> pool,
                                              const LogisticModel& real_model);

struct PredictionRecord {
  ProspectClass predicted;
  ProspectClass truth;
  int x_pr;
};

/// TNR_priv - TNR_upriv with Low as the negative class. Empty when a group
/// has no truly-Low member.
std::optional<double> equal_opportunity(std::span<const PredictionRecord> predictions);

/// Pool composition and this step's hiring statistics. Fills the mean skill,
/// fraction, count and T_u columns of the row; the rest are left untouched.
void auxiliary_metrics(std::span<const Individual> active, std::span<const Individual> waiting,
                       std::span<const HistoryRecord> hires_this_step, MetricsRow& row);

/// Predict Full/Base class of an individual.
ProspectClass predict_class(const LogisticModel& model, const Individual& ind);

/// Real-prospect class from the s_real surrogate model.
ProspectClass real_class(const LogisticModel& real_model, const Individual& ind);

}  // namespace lmsim
