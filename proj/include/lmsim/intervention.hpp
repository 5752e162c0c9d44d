#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "lmsim/population.hpp"
#include "lmsim/prediction.hpp"

namespace lmsim {

enum class ScenarioName { Balanced, OnlyLow, OnlyHigh, BalancedErrorsPenalized, Custom };

std::string_view to_string(ScenarioName s);
std::optional<ScenarioName> parse_scenario_name(std::string_view s);

/// Rows: real class (Low, High). Columns: predicted class (Low, High).
using KMatrix = std::array<std::array<double, 2>, 2>;

struct ScenarioConfig {
  ScenarioName name = ScenarioName::Balanced;
  KMatrix k_display{{{1.0, 1.0}, {1.0, 1.0}}};
  double k_scale = 1.0 / 500.0;

  /// One of the four named scenarios with its fixed matrix.
  static ScenarioConfig named(ScenarioName name, double k_scale = 1.0 / 500.0);
  static ScenarioConfig custom(const KMatrix& k_display, double k_scale = 1.0 / 500.0);

  void validate() const;
  bool operator==(const ScenarioConfig&) const = default;
};

struct InterventionParams {
  double x1_max = 2.0;
  double x2_max = 1.5;
  int delta_t_u = 5;       // waiting time of the Low-predicted
  int t_u_max = 36;        // forced exit
  int t_u_threshold = 9;   // spells longer than this are Low prospect

  void validate(const PopulationParams& population) const;
  bool operator==(const InterventionParams&) const = default;
};

/// x1 cap = trunc, x2 cap = upper x2 bound of the privileged group. The cap
/// is shared by both groups.
std::pair<double, double> default_skill_caps(const PopulationParams& population);

/// Effective growth rate for an individual, k_display[real][predicted] * k_scale.
double k_lookup(const ScenarioConfig& scenario, ProspectClass real, ProspectClass predicted);

/// max(x + k (x_max - x), x)
inline double update_skill(double x, double k, double x_max) {
  const double grown = x + k * (x_max - x);
  return grown > x ? grown : x;
}

/// Apply `repetitions` skill updates with rate k to both features. Waiting
/// state is left to the caller.
Individual apply_help(Individual individual, double k, const InterventionParams& params,
                      int repetitions);

}  // namespace lmsim
