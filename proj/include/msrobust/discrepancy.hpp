#pragma once

#include <cstddef>
#include <string>

#include "msrobust/data.hpp"
#include "msrobust/linear.hpp"

namespace msrobust {

struct DiscrepancyEstimate {
  double value = 0.0;        // clamp(1 - solver_risk, 0, 1)
  double solver_risk = 1.0;  // weighted 0/1 risk of the relaxed minimizer on the merged problem
  std::string source_id;
};

/// Ridge used when conditioning the squared-loss relaxation.
inline constexpr double kRelaxationRidge = 1e-6;

inline TrainConfig default_relax_config() {
  TrainConfig c;
  c.ridge_strength = kRelaxationRidge;
  return c;
}

/// The merged flipped-label problem: source rows carry -y with weight 1/m_s,
/// reference rows carry y with weight 1/m_T. Source rows come first.
struct FlippedProblem {
  WeightedSamples samples;
  std::size_t source_count = 0;
  std::size_t reference_count = 0;
};

FlippedProblem build_flipped_problem(const Dataset& source, const Dataset& reference);

/// Minimizer of 1/2 sum_j weight_j (w.x_j + b - t_j)^2 + (ridge / 2) ||w||^2,
/// solved exactly through the normal equations.
LinearPredictor solve_weighted_least_squares(const WeightedSamples& samples, double ridge);

/// Risk numerator/denominator kept in integers so identities like d(S,S) = 0 hold exactly.
struct FlippedRisk {
  std::size_t source_errors = 0;     // against flipped labels
  std::size_t reference_errors = 0;  // against true labels
  std::size_t source_count = 0;
  std::size_t reference_count = 0;

  double risk() const;
  double discrepancy() const;  // clamp(1 - risk, 0, 1)
};

FlippedRisk flipped_risk(const LinearPredictor& h, const Dataset& source, const Dataset& reference);
/// Source half of flipped_risk(): errors of h against the negated source labels.
std::size_t flipped_source_errors(const LinearPredictor& h, const Dataset& source);

/// Empirical discrepancy through the flipped-label ERM reduction with a
/// squared-loss relaxation. Uses relax_config.ridge_strength as the ridge.
DiscrepancyEstimate empirical_discrepancy(const Dataset& source, const Dataset& reference,
                                          const TrainConfig& relax_config = default_relax_config());

enum class HypothesisFamily { thresholds_1d, lines_2d };

/// Largest instance the exact oracle accepts (source + reference samples).
inline constexpr std::size_t kOracleMaxSamples = 200;

/// sup_h |err_source(h) - err_reference(h)| computed by enumerating every
/// labeling the family realizes on the union of both point sets.
double exact_discrepancy_oracle(const Dataset& source, const Dataset& reference, HypothesisFamily family);

}  // namespace msrobust
