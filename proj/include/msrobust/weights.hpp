#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace msrobust {

/// A point on the probability simplex: one nonnegative weight per source, summing to one.
class SimplexWeights {
 public:
  /// Entries down to -1e-12 are clamped to zero; anything else off the
  /// simplex (sum off by more than 1e-9) throws std::invalid_argument.
  explicit SimplexWeights(std::vector<double> alpha);

  static SimplexWeights uniform(std::size_t n);
  static SimplexWeights proportional(std::span<const std::size_t> counts);

  const std::vector<double>& values() const noexcept { return alpha_; }
  std::size_t size() const noexcept { return alpha_.size(); }
  double operator[](std::size_t i) const { return alpha_[i]; }

 private:
  std::vector<double> alpha_;
};

/// Inputs of the source-weighting program
///   min_alpha  sum_i alpha_i d_i + lambda * sqrt(sum_i alpha_i^2 / m_i)   over the simplex.
struct WeightProblem {
  std::vector<double> discrepancies;
  std::vector<std::size_t> sample_counts;
  double lambda = 0.0;

  void validate() const;
};

double weight_objective(const WeightProblem& problem, std::span<const double> alpha);

/// Euclidean projection onto the probability simplex (sort and threshold).
SimplexWeights project_simplex(std::span<const double> v);

/// Global minimizer of the weighting program.
///
/// lambda == 0 is solved in closed form: the mass goes to the sources with the
/// smallest discrepancy, split in proportion to their sample counts (the
/// lambda -> 0+ limit of the solution path). Otherwise projected gradient with
/// backtracking from the uniform point.
SimplexWeights solve_weights(const WeightProblem& problem);

struct BoundInputs {
  SimplexWeights alpha;
  std::vector<double> discrepancies;
  std::vector<std::size_t> sample_counts;
  std::vector<double> rademacher_bounds;
  double loss_bound = 1.0;  // M
  double delta = 0.05;

  void validate() const;
};

/// Excess target risk over the best-in-class predictor guaranteed with
/// probability 1 - delta:
///   4 sum a_i R_i + 2 sum a_i d_i + 6 sqrt(ln(4/delta) M^2 / 2) sqrt(sum a_i^2 / m_i).
double excess_risk_bound(const BoundInputs& inputs);

/// Rademacher complexity bound B*D/sqrt(m) for linear classifiers with
/// ||w|| <= B on inputs with ||x|| <= D.
double linear_rademacher_bound(double weight_norm_bound, double data_norm_bound, std::size_t m);

}  // namespace msrobust
