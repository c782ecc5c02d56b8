#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "msrobust/data.hpp"
#include "msrobust/weights.hpp"

namespace msrobust {

/// Threshold of the Huber-type logistic loss (1.345 squared).
inline constexpr double kHuberThreshold = 1.345 * 1.345;

/// h(x) = sign(w.x + b), ties to +1; probability score sigmoid(w.x + b).
struct LinearPredictor {
  Vector weights;
  double bias = 0.0;

  static LinearPredictor zero(std::size_t n_features) { return {Vector::Zero(static_cast<Eigen::Index>(n_features)), 0.0}; }

  template <typename Row>
  double score(const Row& x) const {
    if (x.size() != weights.size()) throw std::invalid_argument("predictor/feature dimension mismatch");
    return x.dot(weights) + bias;
  }
  template <typename Row>
  int predict_label(const Row& x) const { return score(x) >= 0.0 ? 1 : -1; }
  template <typename Row>
  double probability(const Row& x) const;

  /// (w, b) stacked into one vector of length n_features + 1.
  Vector stacked() const;
  static LinearPredictor from_stacked(const Vector& params);
};

double sigmoid(double z);

template <typename Row>
double LinearPredictor::probability(const Row& x) const {
  return sigmoid(score(x));
}

void to_json(nlohmann::json& j, const LinearPredictor& p);
void from_json(const nlohmann::json& j, LinearPredictor& p);
/// {"weights":[...],"bias":b} with 17 significant digits.
std::string predictor_to_json_string(const LinearPredictor& p);

enum class Loss { logistic, huber_logistic, squared };

Loss loss_from_string(const std::string& name);
std::string to_string(Loss loss);

/// log(1 + exp(-margin)) without overflow for large |margin|.
double logistic_of_margin(double margin);
/// Huber-tempered logistic: l if l <= c, else 2 sqrt(c l) - c, where l is the logistic loss.
double huber_of_logistic(double logistic_value, double c = kHuberThreshold);

/// Loss value and its derivative with respect to the score z = w.x + b.
struct LossValue {
  double value;
  double derivative;
};
LossValue evaluate_loss(Loss loss, double score, int label);

template <typename Row>
double logistic_loss(const LinearPredictor& h, const Row& x, int y) {
  return logistic_of_margin(static_cast<double>(y) * h.score(x));
}

template <typename Row>
double huber_logistic_loss(const LinearPredictor& h, const Row& x, int y, double c = kHuberThreshold) {
  if (!(c > 0.0)) throw std::invalid_argument("huber threshold must be positive");
  return huber_of_logistic(logistic_loss(h, x, y), c);
}

/// Fraction of samples whose predicted label differs from the true one.
double zero_one_error(const LinearPredictor& h, const Dataset& data);
/// Number of misclassified samples.
std::size_t count_errors(const LinearPredictor& h, const Dataset& data);

enum class StepRule { fixed, backtracking };

struct TrainConfig {
  double ridge_strength = 1e-3;  // mu, applies to w only
  int max_iterations = 50000;
  double tolerance = 1e-10;      // relative objective change
  StepRule step_rule = StepRule::backtracking;
  double fixed_step = 1.0;       // used by StepRule::fixed

  void validate() const;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flattened training set: one row per sample with its target and weight.
struct WeightedSamples {
  Matrix features;
  std::vector<int> labels;
  Vector weights;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t n_features() const noexcept { return static_cast<std::size_t>(features.cols()); }
};

/// Sample weights alpha_i / m_i for every point of source i. Sources with
/// alpha_i == 0 are left out entirely.
WeightedSamples weighted_pool_samples(const SourcePool& pool, const SimplexWeights& alpha);

/// sum_j weight_j L(w.x_j + b, y_j) + (mu / 2) ||w||^2 over stacked parameters (w, b).
class ErmObjective {
 public:
  ErmObjective(WeightedSamples samples, Loss loss, double ridge_strength);

  std::size_t dimension() const noexcept { return samples_.n_features() + 1; }
  double value(const Vector& params) const;
  double value_and_gradient(const Vector& params, Vector& gradient) const;

 private:
  WeightedSamples samples_;
  Loss loss_;
  double ridge_;
};

struct OptimizationReport {
  int iterations = 0;
  double objective = 0.0;
  bool converged = false;
};

/// Deterministic first-order minimization from zero: L-BFGS directions with
/// Armijo backtracking (or plain gradient steps of fixed length when
/// config.step_rule == fixed). Stops when the relative objective change drops
/// below config.tolerance.
LinearPredictor minimize_objective(const ErmObjective& objective, const TrainConfig& config,
                                   OptimizationReport* report = nullptr);

/// alpha-weighted regularized ERM over the pool's sources.
LinearPredictor train_weighted_erm(const SourcePool& pool, const SimplexWeights& alpha, Loss loss,
                                   const TrainConfig& config, OptimizationReport* report = nullptr);

/// Unweighted (per-sample uniform) regularized ERM on a single dataset.
LinearPredictor train_erm(const Dataset& data, Loss loss, const TrainConfig& config);

}  // namespace msrobust
