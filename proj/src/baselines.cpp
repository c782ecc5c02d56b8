#include "msrobust/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace msrobust {

namespace {

void check_points(std::span<const Vector> points) {
  if (points.empty()) throw std::invalid_argument("aggregation needs at least one point");
  for (const auto& p : points)
    if (p.size() != points.front().size()) throw std::invalid_argument("aggregated points differ in dimension");
}

std::vector<Vector> stack_models(std::span<const LinearPredictor> models) {
  if (models.empty()) throw std::invalid_argument("aggregation needs at least one model");
  std::vector<Vector> out;
  out.reserve(models.size());
  for (const auto& m : models) out.push_back(m.stacked());
  return out;
}

}  // namespace

double sum_of_distances(std::span<const Vector> points, const Vector& z) {
  double total = 0.0;
  for (const auto& p : points) total += (z - p).norm();
  return total;
}

Vector geometric_median(std::span<const Vector> points, double tolerance) {
  check_points(points);
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (points.size() == 1) return points.front();

  constexpr double kFloor = 1e-10;
  constexpr int kMaxIterations = 10000;

  Vector z = Vector::Zero(points.front().size());
  for (const auto& p : points) z += p;
  z /= static_cast<double>(points.size());
  double f = sum_of_distances(points, z);

  Vector num(z.size());
  for (int it = 0; it < kMaxIterations; ++it) {
    num.setZero();
    double den = 0.0;
    for (const auto& p : points) {
      const double w = 1.0 / std::max((z - p).norm(), kFloor);
      num += w * p;
      den += w;
    }
    Vector next = num / den;
    const double f_next = sum_of_distances(points, next);
    if (!(f_next < f)) break;
    const double change = f - f_next;
    z = std::move(next);
    f = f_next;
    if (change <= tolerance) break;
  }

  for (const auto& p : points) {
    const double fp = sum_of_distances(points, p);
    if (fp < f) {
      f = fp;
      z = p;
    }
  }
  return z;
}

double median_of(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty set");
  const auto n = values.size();
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(values.begin(), mid, values.end());
  if (n % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(values.begin(), mid);
  return 0.5 * (lower + upper);
}

Vector componentwise_median(std::span<const Vector> points) {
  check_points(points);
  const auto d = points.front().size();
  Vector out(d);
  std::vector<double> column(points.size());
  for (Eigen::Index c = 0; c < d; ++c) {
    for (std::size_t k = 0; k < points.size(); ++k) column[k] = points[k][c];
    out[c] = median_of(column);
  }
  return out;
}

double median_of_probabilities_error(std::span<const LinearPredictor> models, const Dataset& data) {
  if (data.empty()) throw std::invalid_argument("error on an empty dataset");
  std::size_t errors = 0;
  for (std::size_t i = 0; i < data.size(); ++i)
    if (median_of_probabilities(models, data.row(i)) != data.label(i)) ++errors;
  return static_cast<double>(errors) / static_cast<double>(data.size());
}

std::vector<LinearPredictor> train_local_models(const SourcePool& pool, const TrainConfig& config) {
  std::vector<LinearPredictor> models;
  models.reserve(pool.n_sources());
  for (const auto& s : pool.sources()) models.push_back(train_erm(s, Loss::logistic, config));
  return models;
}

LinearPredictor aggregate_geometric_median(std::span<const LinearPredictor> models) {
  const auto stacked = stack_models(models);
  return LinearPredictor::from_stacked(geometric_median(stacked));
}

LinearPredictor aggregate_componentwise_median(std::span<const LinearPredictor> models) {
  const auto stacked = stack_models(models);
  return LinearPredictor::from_stacked(componentwise_median(stacked));
}

NormalizationStats fit_normalization(const Dataset& data) {
  if (data.empty()) throw std::invalid_argument("cannot fit normalization on an empty dataset");
  const auto& x = data.features();
  const double n = static_cast<double>(data.size());
  NormalizationStats s;
  s.mean = x.colwise().sum().transpose() / n;
  s.std = ((x.rowwise() - s.mean.transpose()).array().square().colwise().sum().transpose() / n).sqrt();
  return s;
}

Dataset apply_normalization(const Dataset& data, const NormalizationStats& stats) {
  if (static_cast<std::size_t>(stats.mean.size()) != data.n_features() ||
      static_cast<std::size_t>(stats.std.size()) != data.n_features())
    throw std::invalid_argument("normalization stats do not match n_features");
  Matrix x = data.features();
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    if (stats.std[c] < kDegenerateStd) x.col(c).setZero();
    else x.col(c) = (x.col(c).array() - stats.mean[c]) / stats.std[c];
  }
  return data.with_features(std::move(x));
}

}  // namespace msrobust
