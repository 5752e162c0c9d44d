#include "lmsim/labor_market.hpp"

#include "lmsim/error.hpp"
#include "lmsim/prediction.hpp"

namespace lmsim {

void MarketParams::validate() const {
  if (!(alpha_l > 0.0)) throw ValidationError("market.alpha_l must be > 0");
  if (!(beta_b >= 0.0)) throw ValidationError("market.beta_b must be >= 0");
}

double job_probability(const MarketParams& params, double s, int x_pr) {
  return logistic(params.alpha_l * s - params.beta_l + bias_term(params.beta_b, x_pr));
}

bool draw_hire(Rng& rng, double p) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return u(rng) < p;
}

}  // namespace lmsim
