#pragma once

#include <Eigen/Dense>
#include <span>
#include <string_view>
#include <vector>

namespace lmsim {

enum class Variant { Full, Base, RealProspect };

std::string_view to_string(Variant v);

/// Number of feature coefficients a variant carries: Full uses (x1, x_pr),
/// Base uses x1, RealProspect uses s_real.
int arity(Variant v);

enum class ProspectClass { Low, High };

std::string_view to_string(ProspectClass c);

/// One completed unemployment spell.
struct HistoryRecord {
  double x1 = 0.0;
  int x_pr = 0;
  double s_real = 0.0;
  int t_u = 1;
};

struct LogisticModel {
  Variant variant = Variant::Full;
  std::vector<double> coefficients;
  double intercept = 0.0;

  bool operator==(const LogisticModel&) const = default;
};

struct FitOptions {
  double ridge = 1e-6;  // L2 penalty on the slopes (not the intercept)
  double tol = 1e-8;    // max-norm of the Newton step at convergence
  int max_iter = 100;

  void validate() const;
  bool operator==(const FitOptions&) const = default;
};

struct FitResult {
  LogisticModel model;
  bool converged = false;
  int iterations = 0;
};

/// Numerically safe logistic function.
double logistic(double z);

/// Maximize the L2-penalized Bernoulli log-likelihood
///
///   sum_i [ y_i z_i - log(1 + exp(z_i)) ] - ridge/2 * |w|^2,  z_i = w.x_i + b
///
/// by Newton/IRLS, halving the step whenever the objective would decrease.
/// Iteration starts from all-zero parameters, or from `start` when it is a
/// model of the same variant. Label 1 is the Low-prospect event T_u > T_u^y.
///
/// Throws DegenerateHistory when there are fewer than two rows or all labels
/// are equal. When max_iter runs out the best iterate is returned with
/// converged = false.
FitResult fit_logistic(const Eigen::MatrixXd& features, std::span<const int> labels,
                       const FitOptions& options, Variant variant,
                       const LogisticModel* start = nullptr);

/// P(T_u > T_u^y | features). Throws ArityMismatch on a wrong feature count.
double prob_low(const LogisticModel& model, std::span<const double> features);

/// Low iff p_low > 0.5; a tie goes to High.
ProspectClass classify(double p_low);

/// Class the Full model assigns to (x1, 1 - x_pr). Throws WrongVariant
/// for any other variant.
ProspectClass counterfactual_class(const LogisticModel& model, double x1, int x_pr);

/// Label of a spell: 1 (Low prospect) iff t_u > threshold.
inline int low_label(int t_u, int threshold) { return t_u > threshold ? 1 : 0; }

/// Fit the PES predictor (Full or Base) on the history.
FitResult fit_prediction(std::span<const HistoryRecord> history, Variant variant,
                         int t_u_threshold, const FitOptions& options,
                         const LogisticModel* start = nullptr);

/// Fit the real-prospect surrogate, a single-feature model on s_real.
FitResult fit_real_prospect(std::span<const HistoryRecord> history, int t_u_threshold,
                            const FitOptions& options, const LogisticModel* start = nullptr);

}  // namespace lmsim
