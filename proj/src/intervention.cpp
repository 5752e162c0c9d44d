#include "lmsim/intervention.hpp"

#include <string>

#include "lmsim/error.hpp"

namespace lmsim {

std::string_view to_string(ScenarioName s) {
  switch (s) {
    case ScenarioName::Balanced: return "balanced";
    case ScenarioName::OnlyLow: return "onlylow";
    case ScenarioName::OnlyHigh: return "onlyhigh";
    case ScenarioName::BalancedErrorsPenalized: return "balanced_errors_penalized";
    case ScenarioName::Custom: return "custom";
  }
  return "?";
}

std::optional<ScenarioName> parse_scenario_name(std::string_view s) {
  for (auto n : {ScenarioName::Balanced, ScenarioName::OnlyLow, ScenarioName::OnlyHigh,
                 ScenarioName::BalancedErrorsPenalized, ScenarioName::Custom}) {
    if (s == to_string(n)) return n;
  }
  return std::nullopt;
}

ScenarioConfig ScenarioConfig::named(ScenarioName name, double k_scale) {
  ScenarioConfig s;
  s.name = name;
  s.k_scale = k_scale;
  switch (name) {
    case ScenarioName::Balanced:
    case ScenarioName::Custom: s.k_display = {{{1.0, 1.0}, {1.0, 1.0}}}; break;
    case ScenarioName::OnlyLow: s.k_display = {{{1.0, 0.0}, {1.0, 0.0}}}; break;
    case ScenarioName::OnlyHigh: s.k_display = {{{0.0, 1.0}, {0.0, 1.0}}}; break;
    case ScenarioName::BalancedErrorsPenalized: s.k_display = {{{1.0, 1.0}, {0.5, 1.0}}}; break;
  }
  return s;
}

ScenarioConfig ScenarioConfig::custom(const KMatrix& k_display, double k_scale) {
  ScenarioConfig s;
  s.name = ScenarioName::Custom;
  s.k_display = k_display;
  s.k_scale = k_scale;
  return s;
}

void ScenarioConfig::validate() const {
  if (!(k_scale >= 0.0)) throw ValidationError("scenario.k_scale must be >= 0");
  for (const auto& row : k_display) {
    for (double k : row) {
      if (!(k >= 0.0)) throw ValidationError("scenario k matrix entries must be >= 0");
    }
  }
  if (name != ScenarioName::Custom && k_display != named(name, k_scale).k_display) {
    throw ValidationError("scenario '" + std::string(to_string(name)) +
                          "' has a fixed k matrix; use name = custom to set entries");
  }
}

void InterventionParams::validate(const PopulationParams& population) const {
  const auto [cap1, cap2] = default_skill_caps(population);
  if (!(x1_max >= cap1)) {
    throw ValidationError("intervention.x1_max must be >= the largest attainable x1 (trunc)");
  }
  if (!(x2_max >= cap2)) {
    throw ValidationError("intervention.x2_max must be >= the largest attainable x2");
  }
  if (delta_t_u < 0) throw ValidationError("intervention.delta_t_u must be >= 0");
  if (t_u_threshold < 1) throw ValidationError("intervention.t_u_threshold must be >= 1");
  if (t_u_max <= t_u_threshold) {
    throw ValidationError("intervention.t_u_max must be > intervention.t_u_threshold");
  }
}

std::pair<double, double> default_skill_caps(const PopulationParams& population) {
  return {population.trunc, x2_bounds(population, 1).hi};
}

double k_lookup(const ScenarioConfig& scenario, ProspectClass real, ProspectClass predicted) {
  const auto row = real == ProspectClass::Low ? 0 : 1;
  const auto col = predicted == ProspectClass::Low ? 0 : 1;
  return scenario.k_display[row][col] * scenario.k_scale;
}

Individual apply_help(Individual individual, double k, const InterventionParams& params,
                      int repetitions) {
  for (int r = 0; r < repetitions; ++r) {
    individual.x1 = update_skill(individual.x1, k, params.x1_max);
    individual.x2 = update_skill(individual.x2, k, params.x2_max);
  }
  return individual;
}

}  // namespace lmsim
