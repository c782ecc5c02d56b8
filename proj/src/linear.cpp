#include "msrobust/linear.hpp"

#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>

namespace msrobust {

Vector LinearPredictor::stacked() const {
  Vector p(weights.size() + 1);
  p.head(weights.size()) = weights;
  p[weights.size()] = bias;
  return p;
}

LinearPredictor LinearPredictor::from_stacked(const Vector& params) {
  if (params.size() < 2) throw std::invalid_argument("stacked predictor needs at least two entries");
  const auto d = params.size() - 1;
  return {params.head(d), params[d]};
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void to_json(nlohmann::json& j, const LinearPredictor& p) {
  j = nlohmann::json{{"weights", std::vector<double>(p.weights.data(), p.weights.data() + p.weights.size())},
                     {"bias", p.bias}};
}

void from_json(const nlohmann::json& j, LinearPredictor& p) {
  const auto w = j.at("weights").get<std::vector<double>>();
  if (w.empty()) throw std::invalid_argument("predictor JSON has no weights");
  p.weights = Eigen::Map<const Vector>(w.data(), static_cast<Eigen::Index>(w.size()));
  p.bias = j.at("bias").get<double>();
  if (!p.weights.allFinite() || !std::isfinite(p.bias)) throw std::invalid_argument("predictor JSON has non-finite entries");
}

namespace {
std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace

std::string predictor_to_json_string(const LinearPredictor& p) {
  std::string out = "{\"weights\":[";
  for (Eigen::Index i = 0; i < p.weights.size(); ++i) {
    if (i) out += ',';
    out += g17(p.weights[i]);
  }
  out += "],\"bias\":" + g17(p.bias) + "}";
  return out;
}

Loss loss_from_string(const std::string& name) {
  if (name == "logistic") return Loss::logistic;
  if (name == "huber_logistic") return Loss::huber_logistic;
  if (name == "squared") return Loss::squared;
  throw std::invalid_argument("unknown loss '" + name + "'");
}

std::string to_string(Loss loss) {
  switch (loss) {
    case Loss::logistic: return "logistic";
    case Loss::huber_logistic: return "huber_logistic";
    case Loss::squared: return "squared";
  }
  return "?";
}

double logistic_of_margin(double margin) {
  const double t = -margin;
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double huber_of_logistic(double l, double c) {
  return l <= c ? l : 2.0 * std::sqrt(c * l) - c;
}

LossValue evaluate_loss(Loss loss, double score, int label) {
  const double y = static_cast<double>(label);
  switch (loss) {
    case Loss::logistic: {
      const double m = y * score;
      return {logistic_of_margin(m), -y * sigmoid(-m)};
    }
    case Loss::huber_logistic: {
      const double m = y * score;
      const double l = logistic_of_margin(m);
      const double dl = -y * sigmoid(-m);
      if (l <= kHuberThreshold) return {l, dl};
      return {2.0 * std::sqrt(kHuberThreshold * l) - kHuberThreshold, std::sqrt(kHuberThreshold / l) * dl};
    }
    case Loss::squared: {
      // 1/2 (z - y)^2
      const double r = score - y;
      return {0.5 * r * r, r};
    }
  }
  return {0.0, 0.0};
}

std::size_t count_errors(const LinearPredictor& h, const Dataset& data) {
  if (static_cast<std::size_t>(h.weights.size()) != data.n_features())
    throw std::invalid_argument("predictor/dataset dimension mismatch");
  const Vector z = data.features() * h.weights;
  std::size_t errors = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const int predicted = z[static_cast<Eigen::Index>(i)] + h.bias >= 0.0 ? 1 : -1;
    if (predicted != data.label(i)) ++errors;
  }
  return errors;
}

double zero_one_error(const LinearPredictor& h, const Dataset& data) {
  if (data.empty()) throw std::invalid_argument("zero_one_error on an empty dataset");
  return static_cast<double>(count_errors(h, data)) / static_cast<double>(data.size());
}

void TrainConfig::validate() const {
  if (!(ridge_strength >= 0.0) || !std::isfinite(ridge_strength)) throw std::invalid_argument("ridge_strength must be >= 0");
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be > 0");
  if (step_rule == StepRule::fixed && !(fixed_step > 0.0)) throw std::invalid_argument("fixed_step must be > 0");
}

WeightedSamples weighted_pool_samples(const SourcePool& pool, const SimplexWeights& alpha) {
  if (alpha.size() != pool.n_sources())
    throw std::invalid_argument("alpha has " + std::to_string(alpha.size()) + " entries for " +
                                std::to_string(pool.n_sources()) + " sources");
  Eigen::Index rows = 0;
  for (std::size_t i = 0; i < pool.n_sources(); ++i)
    if (alpha[i] > 0.0) rows += static_cast<Eigen::Index>(pool.source(i).size());

  WeightedSamples out{Matrix(rows, static_cast<Eigen::Index>(pool.n_features())), {}, Vector(rows)};
  out.labels.reserve(static_cast<std::size_t>(rows));
  Eigen::Index at = 0;
  for (std::size_t i = 0; i < pool.n_sources(); ++i) {
    if (alpha[i] <= 0.0) continue;
    const auto& s = pool.source(i);
    const auto m = static_cast<Eigen::Index>(s.size());
    out.features.middleRows(at, m) = s.features();
    out.weights.segment(at, m).setConstant(alpha[i] / static_cast<double>(m));
    out.labels.insert(out.labels.end(), s.labels().begin(), s.labels().end());
    at += m;
  }
  return out;
}

ErmObjective::ErmObjective(WeightedSamples samples, Loss loss, double ridge_strength)
    : samples_(std::move(samples)), loss_(loss), ridge_(ridge_strength) {
  if (static_cast<std::size_t>(samples_.weights.size()) != samples_.size())
    throw std::invalid_argument("sample weights and labels differ in length");
}

double ErmObjective::value(const Vector& params) const {
  const auto d = static_cast<Eigen::Index>(samples_.n_features());
  if (params.size() != d + 1) throw std::invalid_argument("parameter dimension mismatch");
  const Vector z = samples_.features * params.head(d);
  double f = 0.0;
  for (std::size_t j = 0; j < samples_.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    f += samples_.weights[jj] * evaluate_loss(loss_, z[jj] + params[d], samples_.labels[j]).value;
  }
  return f + 0.5 * ridge_ * params.head(d).squaredNorm();
}

double ErmObjective::value_and_gradient(const Vector& params, Vector& gradient) const {
  const auto d = static_cast<Eigen::Index>(samples_.n_features());
  if (params.size() != d + 1) throw std::invalid_argument("parameter dimension mismatch");
  const Vector z = samples_.features * params.head(d);
  Vector coeff(static_cast<Eigen::Index>(samples_.size()));
  double f = 0.0;
  for (std::size_t j = 0; j < samples_.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const auto lv = evaluate_loss(loss_, z[jj] + params[d], samples_.labels[j]);
    f += samples_.weights[jj] * lv.value;
    coeff[jj] = samples_.weights[jj] * lv.derivative;
  }
  gradient.resize(d + 1);
  gradient.head(d) = samples_.features.transpose() * coeff + ridge_ * params.head(d);
  gradient[d] = coeff.sum();
  return f + 0.5 * ridge_ * params.head(d).squaredNorm();
}

namespace {

bool finite_pair(double f, const Vector& g) { return std::isfinite(f) && g.allFinite(); }

bool small_change(double before, double after, double tol) {
  return std::abs(before - after) <= tol * std::max(1.0, std::abs(after));
}

}  // namespace

LinearPredictor minimize_objective(const ErmObjective& objective, const TrainConfig& config,
                                   OptimizationReport* report) {
  config.validate();
  const auto n = static_cast<Eigen::Index>(objective.dimension());
  Vector x = Vector::Zero(n), g(n), g_new(n), x_new(n);
  double f = objective.value_and_gradient(x, g);
  if (!finite_pair(f, g)) throw NumericalError("non-finite objective at the zero predictor");

  OptimizationReport rep;
  constexpr std::size_t kMemory = 10;
  std::deque<Vector> s_hist, y_hist;
  std::deque<double> rho_hist;

  for (int it = 0; it < config.max_iterations; ++it) {
    rep.iterations = it + 1;
    if (g.lpNorm<Eigen::Infinity>() == 0.0) {
      rep.converged = true;
      break;
    }

    if (config.step_rule == StepRule::fixed) {
      x_new = x - config.fixed_step * g;
      const double f_new = objective.value_and_gradient(x_new, g_new);
      if (!finite_pair(f_new, g_new)) throw NumericalError("non-finite objective; fixed step too large?");
      const bool done = small_change(f, f_new, config.tolerance);
      x.swap(x_new), g.swap(g_new), f = f_new;
      if (done) {
        rep.converged = true;
        break;
      }
      continue;
    }

    // Two-loop recursion.
    Vector dir = -g;
    std::vector<double> a(s_hist.size());
    for (std::size_t k = s_hist.size(); k-- > 0;) {
      a[k] = rho_hist[k] * s_hist[k].dot(dir);
      dir -= a[k] * y_hist[k];
    }
    if (!s_hist.empty()) dir *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    for (std::size_t k = 0; k < s_hist.size(); ++k) {
      const double b = rho_hist[k] * y_hist[k].dot(dir);
      dir += (a[k] - b) * s_hist[k];
    }
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      s_hist.clear(), y_hist.clear(), rho_hist.clear();
      dir = -g;
      slope = -g.squaredNorm();
    }

    double step = s_hist.empty() ? std::min(1.0, 1.0 / g.lpNorm<Eigen::Infinity>()) : 1.0;
    double f_new = f;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = x + step * dir;
      f_new = objective.value_and_gradient(x_new, g_new);
      if (finite_pair(f_new, g_new) && f_new <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // No further decrease representable in floating point.
      rep.converged = true;
      break;
    }

    Vector s = x_new - x, y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-16 * s.norm() * y.norm()) {
      if (s_hist.size() == kMemory) s_hist.pop_front(), y_hist.pop_front(), rho_hist.pop_front();
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
    }
    const bool done = small_change(f, f_new, config.tolerance);
    x.swap(x_new), g.swap(g_new), f = f_new;
    if (done) {
      rep.converged = true;
      break;
    }
  }
  rep.objective = f;
  if (report) *report = rep;
  return LinearPredictor::from_stacked(x);
}

LinearPredictor train_weighted_erm(const SourcePool& pool, const SimplexWeights& alpha, Loss loss,
                                   const TrainConfig& config, OptimizationReport* report) {
  ErmObjective objective(weighted_pool_samples(pool, alpha), loss, config.ridge_strength);
  return minimize_objective(objective, config, report);
}

LinearPredictor train_erm(const Dataset& data, Loss loss, const TrainConfig& config) {
  if (data.empty()) throw std::invalid_argument("cannot train on an empty dataset");
  WeightedSamples samples{data.features(), data.labels(),
                          Vector::Constant(static_cast<Eigen::Index>(data.size()), 1.0 / static_cast<double>(data.size()))};
  return minimize_objective(ErmObjective(std::move(samples), loss, config.ridge_strength), config);
}

}  // namespace msrobust
