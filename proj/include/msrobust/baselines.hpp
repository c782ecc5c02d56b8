#pragma once

#include <span>
#include <vector>

#include "msrobust/data.hpp"
#include "msrobust/linear.hpp"

namespace msrobust {

// Robust aggregation of per-source models.

/// Weiszfeld iteration for argmin_z sum_k ||z - p_k||, started at the centroid.
/// Denominators are floored at 1e-10 so an iterate landing on an input point
/// stays finite. Returns whichever of the final iterate and the best input
/// point has the lower objective.
Vector geometric_median(std::span<const Vector> points, double tolerance = 1e-10);

double sum_of_distances(std::span<const Vector> points, const Vector& z);

/// Per-coordinate median; even counts average the two middle values.
Vector componentwise_median(std::span<const Vector> points);

/// Median of the models' sigmoid scores at x, thresholded: +1 when the median is >= 0.5.
template <typename Row>
int median_of_probabilities(std::span<const LinearPredictor> models, const Row& x);

double median_of(std::vector<double> values);

/// Test error of the median-of-probabilities ensemble.
double median_of_probabilities_error(std::span<const LinearPredictor> models, const Dataset& data);

/// One logistic-regression model per source, each fit on that source alone.
std::vector<LinearPredictor> train_local_models(const SourcePool& pool, const TrainConfig& config);

/// Stacks (w, b) of each model, aggregates, and unstacks.
LinearPredictor aggregate_geometric_median(std::span<const LinearPredictor> models);
LinearPredictor aggregate_componentwise_median(std::span<const LinearPredictor> models);

// Per-dataset standardization.

struct NormalizationStats {
  Vector mean;
  Vector std;  // population standard deviation
};

/// Features with std below this are mapped to zero.
inline constexpr double kDegenerateStd = 1e-12;

NormalizationStats fit_normalization(const Dataset& data);
Dataset apply_normalization(const Dataset& data, const NormalizationStats& stats);

template <typename Row>
int median_of_probabilities(std::span<const LinearPredictor> models, const Row& x) {
  if (models.empty()) throw std::invalid_argument("median_of_probabilities needs at least one model");
  std::vector<double> probs;
  probs.reserve(models.size());
  for (const auto& m : models) probs.push_back(m.probability(x));
  return median_of(std::move(probs)) >= 0.5 ? 1 : -1;
}

}  // namespace msrobust
