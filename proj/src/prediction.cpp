#include "lmsim/prediction.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lmsim/error.hpp"

namespace lmsim {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::Full: return "full";
    case Variant::Base: return "base";
    case Variant::RealProspect: return "real";
  }
  return "?";
}

int arity(Variant v) { return v == Variant::Full ? 2 : 1; }

std::string_view to_string(ProspectClass c) { return c == ProspectClass::Low ? "low" : "high"; }

void FitOptions::validate() const {
  if (!(ridge >= 0.0)) throw ValidationError("fit.ridge must be >= 0");
  if (!(tol > 0.0)) throw ValidationError("fit.tol must be > 0");
  if (max_iter < 1) throw ValidationError("fit.max_iter must be >= 1");
}

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

// Objective, gradient and information matrix at one parameter vector,
// accumulated in a single pass over the rows.
template <int P>
struct Evaluation {
  double value = 0.0;
  Eigen::Matrix<double, P, 1> grad = Eigen::Matrix<double, P, 1>::Zero();
  Eigen::Matrix<double, P, P> info = Eigen::Matrix<double, P, P>::Zero();
};

template <int P>
using Design = Eigen::Matrix<double, Eigen::Dynamic, P>;

// The last column of `x` is the constant 1.
template <int P>
Evaluation<P> evaluate(const Design<P>& x, const Eigen::ArrayXd& y,
                       const Eigen::Matrix<double, P, 1>& beta, double ridge) {
  Evaluation<P> ev;
  const Eigen::ArrayXd z = (x * beta).array();
  const Eigen::ArrayXd e = (-z.abs()).exp();
  const Eigen::ArrayXd mu = (z >= 0.0).select(1.0 / (1.0 + e), e / (1.0 + e));
  ev.value = (y * z - z.max(0.0) - e.log1p()).sum();
  ev.grad.noalias() = x.transpose() * (y - mu).matrix();
  const Eigen::ArrayXd w = mu * (1.0 - mu);
  for (int a = 0; a < P; ++a) {
    const Eigen::ArrayXd wa = w * x.col(a).array();
    for (int b = 0; b <= a; ++b) ev.info(a, b) = ev.info(b, a) = (wa * x.col(b).array()).sum();
  }
  for (int j = 0; j + 1 < P; ++j) {
    ev.value -= 0.5 * ridge * beta(j) * beta(j);
    ev.grad(j) -= ridge * beta(j);
    ev.info(j, j) += ridge;
  }
  return ev;
}

template <int P>
FitResult newton(const Eigen::MatrixXd& features, std::span<const int> labels,
                 const FitOptions& options, Variant variant, const LogisticModel* start) {
  const auto n = static_cast<Eigen::Index>(labels.size());
  Design<P> x(n, P);
  x.template leftCols<P - 1>() = features;
  x.col(P - 1).setOnes();
  Eigen::ArrayXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = labels[static_cast<std::size_t>(i)];

  Eigen::Matrix<double, P, 1> beta = Eigen::Matrix<double, P, 1>::Zero();
  if (start != nullptr && start->variant == variant &&
      static_cast<int>(start->coefficients.size()) == P - 1) {
    for (int j = 0; j + 1 < P; ++j) beta(j) = start->coefficients[static_cast<std::size_t>(j)];
    beta(P - 1) = start->intercept;
  }
  auto current = evaluate<P>(x, y, beta, options.ridge);

  FitResult result;
  for (int iter = 1; iter <= options.max_iter; ++iter) {
    result.iterations = iter;
    const Eigen::Matrix<double, P, 1> delta = current.info.ldlt().solve(current.grad);

    double step = 1.0;
    Eigen::Matrix<double, P, 1> candidate = beta + delta;
    auto next = evaluate<P>(x, y, candidate, options.ridge);
    const double slack = 1e-12 * (1.0 + std::abs(current.value));
    while (!(next.value >= current.value - slack) && step > 1e-10) {
      step *= 0.5;
      candidate = beta + step * delta;
      next = evaluate<P>(x, y, candidate, options.ridge);
    }
    if (!(next.value >= current.value - slack)) {
      // No ascent direction left at double precision.
      result.converged = true;
      break;
    }
    const double change = (step * delta).cwiseAbs().maxCoeff();
    beta = candidate;
    current = next;
    if (change < options.tol) {
      result.converged = true;
      break;
    }
  }

  result.model.variant = variant;
  result.model.coefficients.assign(beta.data(), beta.data() + P - 1);
  result.model.intercept = beta(P - 1);
  return result;
}

}  // namespace

FitResult fit_logistic(const Eigen::MatrixXd& features, std::span<const int> labels,
                       const FitOptions& options, Variant variant, const LogisticModel* start) {
  const Eigen::Index n = features.rows();
  const Eigen::Index d = features.cols();
  if (d < 1) throw ArityMismatch("fit_logistic needs at least one feature column");
  if (d != arity(variant)) {
    throw ArityMismatch("fit_logistic: " + std::to_string(d) + " columns for variant " +
                        std::string(to_string(variant)));
  }
  if (static_cast<std::size_t>(n) != labels.size()) {
    throw ArityMismatch("fit_logistic: label count differs from row count");
  }
  if (n < 2) throw DegenerateHistory("fewer than 2 training records");
  const auto positives = std::count(labels.begin(), labels.end(), 1);
  if (positives == 0 || positives == n) throw DegenerateHistory("training labels are single-class");

  return d == 1 ? newton<2>(features, labels, options, variant, start)
                : newton<3>(features, labels, options, variant, start);
}

double prob_low(const LogisticModel& model, std::span<const double> features) {
  if (features.size() != model.coefficients.size() ||
      static_cast<int>(features.size()) != arity(model.variant)) {
    throw ArityMismatch("prob_low: expected " + std::to_string(arity(model.variant)) +
                        " features, got " + std::to_string(features.size()));
  }
  double z = model.intercept;
  for (std::size_t j = 0; j < features.size(); ++j) z += model.coefficients[j] * features[j];
  return logistic(z);
}

ProspectClass classify(double p_low) { return p_low > 0.5 ? ProspectClass::Low : ProspectClass::High; }

ProspectClass counterfactual_class(const LogisticModel& model, double x1, int x_pr) {
  if (model.variant != Variant::Full) {
    throw WrongVariant("counterfactual class is only defined for the full model");
  }
  const double flipped[] = {x1, static_cast<double>(1 - x_pr)};
  return classify(prob_low(model, flipped));
}

FitResult fit_prediction(std::span<const HistoryRecord> history, Variant variant, int t_u_threshold,
                         const FitOptions& options, const LogisticModel* start) {
  if (variant == Variant::RealProspect) {
    return fit_real_prospect(history, t_u_threshold, options, start);
  }
  const auto n = static_cast<Eigen::Index>(history.size());
  Eigen::MatrixXd x(n, arity(variant));
  std::vector<int> y(history.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = history[static_cast<std::size_t>(i)];
    x(i, 0) = r.x1;
    if (variant == Variant::Full) x(i, 1) = r.x_pr;
    y[static_cast<std::size_t>(i)] = low_label(r.t_u, t_u_threshold);
  }
  return fit_logistic(x, y, options, variant, start);
}

FitResult fit_real_prospect(std::span<const HistoryRecord> history, int t_u_threshold,
                            const FitOptions& options, const LogisticModel* start) {
  const auto n = static_cast<Eigen::Index>(history.size());
  Eigen::MatrixXd x(n, 1);
  std::vector<int> y(history.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = history[static_cast<std::size_t>(i)];
    x(i, 0) = r.s_real;
    y[static_cast<std::size_t>(i)] = low_label(r.t_u, t_u_threshold);
  }
  return fit_logistic(x, y, options, Variant::RealProspect, start);
}

}  // namespace lmsim
