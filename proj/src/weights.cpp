#include "msrobust/weights.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>

namespace msrobust {

SimplexWeights::SimplexWeights(std::vector<double> alpha) : alpha_(std::move(alpha)) {
  if (alpha_.empty()) throw std::invalid_argument("simplex weights need at least one entry");
  double sum = 0.0;
  for (auto& a : alpha_) {
    if (!std::isfinite(a) || a < -1e-12) throw std::invalid_argument("simplex weight out of range: " + std::to_string(a));
    if (a < 0.0) a = 0.0;
    sum += a;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("simplex weights sum to " + std::to_string(sum));
}

SimplexWeights SimplexWeights::uniform(std::size_t n) {
  if (n == 0) throw std::invalid_argument("simplex weights need at least one entry");
  return SimplexWeights(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

SimplexWeights SimplexWeights::proportional(std::span<const std::size_t> counts) {
  double total = 0.0;
  for (auto m : counts) total += static_cast<double>(m);
  if (counts.empty() || total <= 0.0) throw std::invalid_argument("proportional weights need positive counts");
  std::vector<double> a;
  a.reserve(counts.size());
  for (auto m : counts) a.push_back(static_cast<double>(m) / total);
  return SimplexWeights(std::move(a));
}

void WeightProblem::validate() const {
  if (discrepancies.empty()) throw std::invalid_argument("weight problem has no sources");
  if (discrepancies.size() != sample_counts.size())
    throw std::invalid_argument("discrepancies and sample_counts differ in length");
  for (double d : discrepancies)
    if (!std::isfinite(d) || d < 0.0 || d > 1.0) throw std::invalid_argument("discrepancy outside [0,1]");
  for (auto m : sample_counts)
    if (m == 0) throw std::invalid_argument("sample counts must be positive");
  if (!std::isfinite(lambda) || lambda < 0.0) throw std::invalid_argument("lambda must be finite and >= 0");
}

namespace {

double spread_term(const WeightProblem& p, std::span<const double> alpha) {
  double s = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) s += alpha[i] * alpha[i] / static_cast<double>(p.sample_counts[i]);
  return std::sqrt(s);
}

}  // namespace

double weight_objective(const WeightProblem& p, std::span<const double> alpha) {
  if (alpha.size() != p.discrepancies.size()) throw std::invalid_argument("alpha length mismatch");
  double lin = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) lin += alpha[i] * p.discrepancies[i];
  return lin + p.lambda * spread_term(p, alpha);
}

SimplexWeights project_simplex(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("cannot project an empty vector");
  for (double x : v)
    if (!std::isfinite(x)) throw std::invalid_argument("cannot project a non-finite vector");

  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0, theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double t = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  std::vector<double> out(v.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::max(v[i] - theta, 0.0);
    sum += out[i];
  }
  // Rounding can leave the sum a few ulps away from one.
  for (auto& x : out) x /= sum;
  return SimplexWeights(std::move(out));
}

SimplexWeights solve_weights(const WeightProblem& p) {
  p.validate();
  const std::size_t n = p.discrepancies.size();
  if (n == 1) return SimplexWeights({1.0});

  if (p.lambda == 0.0) {
    const double best = *std::min_element(p.discrepancies.begin(), p.discrepancies.end());
    std::vector<double> alpha(n, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (p.discrepancies[i] == best) total += static_cast<double>(p.sample_counts[i]);
    for (std::size_t i = 0; i < n; ++i)
      if (p.discrepancies[i] == best) alpha[i] = static_cast<double>(p.sample_counts[i]) / total;
    return SimplexWeights(std::move(alpha));
  }

  constexpr int kMaxIterations = 100000;
  constexpr double kObjectiveTolerance = 1e-12;

  auto gradient = [&](const std::vector<double>& a, std::vector<double>& g) {
    const double s = spread_term(p, a);
    for (std::size_t i = 0; i < n; ++i)
      g[i] = p.discrepancies[i] + p.lambda * a[i] / (static_cast<double>(p.sample_counts[i]) * s);
  };

  std::vector<double> alpha(n, 1.0 / static_cast<double>(n));
  std::vector<double> grad(n), trial(n);
  double f = weight_objective(p, alpha);
  double step = 1.0;

  for (int it = 0; it < kMaxIterations; ++it) {
    gradient(alpha, grad);
    double f_new = f;
    bool moved = false;
    step *= 2.0;
    for (int ls = 0; ls < 200; ++ls) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = alpha[i] - step * grad[i];
      trial = project_simplex(trial).values();
      double lin = 0.0, sq = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double diff = trial[i] - alpha[i];
        lin += grad[i] * diff;
        sq += diff * diff;
      }
      if (sq == 0.0) break;
      f_new = weight_objective(p, trial);
      if (f_new <= f + lin + sq / (2.0 * step)) {
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
    const double change = f - f_new;
    alpha.swap(trial);
    f = f_new;
    if (std::abs(change) <= kObjectiveTolerance * std::max(1.0, std::abs(f))) break;
  }
  return SimplexWeights(std::move(alpha));
}

void BoundInputs::validate() const {
  const std::size_t n = alpha.size();
  if (discrepancies.size() != n || sample_counts.size() != n || rademacher_bounds.size() != n)
    throw std::invalid_argument("bound inputs differ in length");
  if (!(loss_bound > 0.0)) throw std::invalid_argument("loss bound M must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
  for (auto m : sample_counts)
    if (m == 0) throw std::invalid_argument("sample counts must be positive");
}

double excess_risk_bound(const BoundInputs& in) {
  in.validate();
  double complexity = 0.0, shift = 0.0, spread = 0.0;
  for (std::size_t i = 0; i < in.alpha.size(); ++i) {
    const double a = in.alpha[i];
    complexity += a * in.rademacher_bounds[i];
    shift += a * in.discrepancies[i];
    spread += a * a / static_cast<double>(in.sample_counts[i]);
  }
  const double confidence = std::sqrt(std::log(4.0 / in.delta) * in.loss_bound * in.loss_bound / 2.0);
  return 4.0 * complexity + 2.0 * shift + 6.0 * confidence * std::sqrt(spread);
}

double linear_rademacher_bound(double weight_norm_bound, double data_norm_bound, std::size_t m) {
  if (!(weight_norm_bound > 0.0) || !(data_norm_bound > 0.0) || m == 0)
    throw std::invalid_argument("linear_rademacher_bound needs B, D > 0 and m >= 1");
  return weight_norm_bound * data_norm_bound / std::sqrt(static_cast<double>(m));
}

}  // namespace msrobust
