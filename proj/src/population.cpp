#include "lmsim/population.hpp"

#include <cmath>

#include "lmsim/error.hpp"

namespace lmsim {

void PopulationParams::validate() const {
  if (!(alpha_pr >= 0.0)) throw ValidationError("population.alpha_pr must be >= 0");
  if (!(trunc > 0.0)) throw ValidationError("population.trunc must be > 0");
}

double sample_truncated_standard_normal(Rng& rng, double trunc) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (;;) {
    const double d = normal(rng);
    if (std::abs(d) <= trunc) return d;
  }
}

Individual sample_individual(Rng& rng, const PopulationParams& params) {
  Individual ind;
  std::bernoulli_distribution coin(0.5);
  ind.x_pr = coin(rng) ? 1 : 0;
  ind.x1 = sample_truncated_standard_normal(rng, params.trunc);
  const double noise = sample_truncated_standard_normal(rng, params.trunc);
  ind.x2 = 0.5 * (params.alpha_pr * (ind.x_pr - 0.5) + noise);
  return ind;
}

Bounds x2_bounds(const PopulationParams& params, int x_pr) {
  const double shift = params.alpha_pr * (x_pr - 0.5);
  return {0.5 * (shift - params.trunc), 0.5 * (shift + params.trunc)};
}

}  // namespace lmsim
