#pragma once

#include <cstdint>

#include "lmsim/random.hpp"

namespace lmsim {

struct PopulationParams {
  double alpha_pr = 2.0;  // group gap coefficient on x2
  double trunc = 2.0;     // truncation half-width, in standard deviations

  void validate() const;
  bool operator==(const PopulationParams&) const = default;
};

/// One job-seeker. x_pr = 1 is the privileged group, 0 the underprivileged.
struct Individual {
  std::int64_t id = 0;
  double x1 = 0.0;
  double x2 = 0.0;
  int x_pr = 0;
  int t_unemployed = 0;
  int wait_remaining = 0;  // 0 = active on the market

  double s_real() const;
  bool operator==(const Individual&) const = default;
};

/// Total skill, the mean of the two skill features.
inline double s_real(double x1, double x2) { return (x1 + x2) / 2.0; }

inline double Individual::s_real() const { return lmsim::s_real(x1, x2); }

/// Draw from N(0, 1) conditioned on |value| <= trunc, by rejection.
double sample_truncated_standard_normal(Rng& rng, double trunc);

/// Fresh individual from the background population. The id is left at 0;
/// the engine assigns ids.
Individual sample_individual(Rng& rng, const PopulationParams& params);

struct Bounds {
  double lo;
  double hi;
};

/// Closed range x2 can take for a group, from the construction of x2.
Bounds x2_bounds(const PopulationParams& params, int x_pr);

}  // namespace lmsim
