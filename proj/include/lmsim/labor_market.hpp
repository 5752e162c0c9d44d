#pragma once

#include "lmsim/random.hpp"

namespace lmsim {

struct MarketParams {
  double alpha_l = 2.0;  // slope of the hiring curve in s_real
  double beta_l = 3.0;   // location: alpha_l * s + b = beta_l gives P = 0.5
  double beta_b = 0.0;   // bias in favour of x_pr = 1; 0 unbiased, 2 biased

  void validate() const;
  bool operator==(const MarketParams&) const = default;
};

/// Shift of the hiring curve for a group: beta_b * (x_pr - 0.5).
inline double bias_term(double beta_b, int x_pr) { return beta_b * (x_pr - 0.5); }

/// Per-timestep hiring probability. Does not depend on time already spent
/// unemployed.
double job_probability(const MarketParams& params, double s, int x_pr);

bool draw_hire(Rng& rng, double p);

}  // namespace lmsim
