#include "lmsim/metrics.hpp"

#include <cmath>

#include "lmsim/error.hpp"

namespace lmsim {

namespace {

struct GroupSums {
  double sum[2] = {0.0, 0.0};
  long count[2] = {0, 0};

  void add(int group, double value) {
    sum[group] += value;
    ++count[group];
  }
  std::optional<double> mean(int group) const {
    if (count[group] == 0) return std::nullopt;
    return sum[group] / static_cast<double>(count[group]);
  }
};

}  // namespace

ProspectClass predict_class(const LogisticModel& model, const Individual& ind) {
  if (model.variant == Variant::Full) {
    const double f[] = {ind.x1, static_cast<double>(ind.x_pr)};
    return classify(prob_low(model, f));
  }
  if (model.variant == Variant::Base) {
    const double f[] = {ind.x1};
    return classify(prob_low(model, f));
  }
  throw WrongVariant("predict_class needs a full or base model");
}

ProspectClass real_class(const LogisticModel& real_model, const Individual& ind) {
  if (real_model.variant != Variant::RealProspect) {
    throw WrongVariant("real_class needs a real-prospect model");
  }
  const double f[] = {ind.s_real()};
  return classify(prob_low(real_model, f));
}

std::optional<double> bgsd(std::span<const Individual> pool) {
  GroupSums g;
  for (const auto& ind : pool) g.add(ind.x_pr, ind.s_real());
  const auto upriv = g.mean(0);
  const auto priv = g.mean(1);
  if (!upriv || !priv) return std::nullopt;
  return *upriv - *priv;
}

std::optional<double> counterfactual_fraction(const LogisticModel& model,
                                              std::span<const Individual> pool,
                                              const LogisticModel& real_model) {
  if (model.variant == Variant::Base) return 0.0;
  long predicted_low = 0;
  long hits = 0;
  for (const auto& ind : pool) {
    if (predict_class(model, ind) != ProspectClass::Low) continue;
    ++predicted_low;
    if (counterfactual_class(model, ind.x1, ind.x_pr) == ProspectClass::High &&
        real_class(real_model, ind) == ProspectClass::High) {
      ++hits;
    }
  }
  if (predicted_low == 0) return std::nullopt;
  return static_cast<double>(hits) / static_cast<double>(predicted_low);
}

std::optional<double> equal_opportunity(std::span<const PredictionRecord> predictions) {
  long true_low[2] = {0, 0};
  long true_negative[2] = {0, 0};
  for (const auto& p : predictions) {
    if (p.truth != ProspectClass::Low) continue;
    ++true_low[p.x_pr];
    if (p.predicted == ProspectClass::Low) ++true_negative[p.x_pr];
  }
  if (true_low[0] == 0 || true_low[1] == 0) return std::nullopt;
  const double tnr_upriv = static_cast<double>(true_negative[0]) / static_cast<double>(true_low[0]);
  const double tnr_priv = static_cast<double>(true_negative[1]) / static_cast<double>(true_low[1]);
  return tnr_priv - tnr_upriv;
}

void auxiliary_metrics(std::span<const Individual> active, std::span<const Individual> waiting,
                       std::span<const HistoryRecord> hires_this_step, MetricsRow& row) {
  GroupSums skill;
  long waiting_count[2] = {0, 0};
  for (const auto& ind : active) skill.add(ind.x_pr, ind.s_real());
  for (const auto& ind : waiting) {
    skill.add(ind.x_pr, ind.s_real());
    ++waiting_count[ind.x_pr];
  }
  const long total = skill.count[0] + skill.count[1];

  row.mean_s_upriv = skill.mean(0);
  row.mean_s_priv = skill.mean(1);
  row.frac_upriv = total > 0 ? std::optional<double>(static_cast<double>(skill.count[0]) /
                                                     static_cast<double>(total))
                             : std::nullopt;
  auto waiting_fraction = [&](int g) -> std::optional<double> {
    if (skill.count[g] == 0) return std::nullopt;
    return static_cast<double>(waiting_count[g]) / static_cast<double>(skill.count[g]);
  };
  row.frac_waiting_upriv = waiting_fraction(0);
  row.frac_waiting_priv = waiting_fraction(1);
  row.n_active = static_cast<double>(active.size());
  row.n_waiting = static_cast<double>(waiting.size());

  GroupSums spells;
  for (const auto& h : hires_this_step) spells.add(h.x_pr, static_cast<double>(h.t_u));
  row.mean_t_u_hires = std::nullopt;
  if (!hires_this_step.empty()) {
    row.mean_t_u_hires = (spells.sum[0] + spells.sum[1]) / static_cast<double>(hires_this_step.size());
  }
  const auto tu_upriv = spells.mean(0);
  const auto tu_priv = spells.mean(1);
  row.bgtud_current = (tu_upriv && tu_priv) ? std::optional<double>(*tu_upriv - *tu_priv) : std::nullopt;
}

}  // namespace lmsim
