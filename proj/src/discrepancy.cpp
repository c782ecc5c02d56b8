#include "msrobust/discrepancy.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <utility>

namespace msrobust {

namespace {

void check_pair(const Dataset& source, const Dataset& reference) {
  if (source.empty() || reference.empty()) throw std::invalid_argument("discrepancy needs nonempty datasets");
  if (source.n_features() != reference.n_features())
    throw std::invalid_argument("source and reference differ in n_features");
}

}  // namespace

FlippedProblem build_flipped_problem(const Dataset& source, const Dataset& reference) {
  check_pair(source, reference);
  const auto ms = static_cast<Eigen::Index>(source.size());
  const auto mt = static_cast<Eigen::Index>(reference.size());
  FlippedProblem p;
  p.source_count = source.size();
  p.reference_count = reference.size();
  p.samples.features.resize(ms + mt, static_cast<Eigen::Index>(source.n_features()));
  p.samples.features.topRows(ms) = source.features();
  p.samples.features.bottomRows(mt) = reference.features();
  p.samples.labels.reserve(static_cast<std::size_t>(ms + mt));
  for (int y : source.labels()) p.samples.labels.push_back(-y);
  p.samples.labels.insert(p.samples.labels.end(), reference.labels().begin(), reference.labels().end());
  p.samples.weights.resize(ms + mt);
  p.samples.weights.head(ms).setConstant(1.0 / static_cast<double>(ms));
  p.samples.weights.tail(mt).setConstant(1.0 / static_cast<double>(mt));
  return p;
}

LinearPredictor solve_weighted_least_squares(const WeightedSamples& s, double ridge) {
  const auto n = static_cast<Eigen::Index>(s.size());
  const auto d = static_cast<Eigen::Index>(s.n_features());
  Matrix design(n, d + 1);
  design.leftCols(d) = s.features;
  design.col(d).setOnes();
  Vector target(n);
  for (Eigen::Index j = 0; j < n; ++j) target[j] = static_cast<double>(s.labels[static_cast<std::size_t>(j)]);

  const Matrix weighted = s.weights.asDiagonal() * design;
  Eigen::MatrixXd gram = design.transpose() * weighted;
  gram.diagonal().head(d).array() += ridge;
  const Vector rhs = weighted.transpose() * target;

  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  Vector params;
  if (ldlt.info() == Eigen::Success && ldlt.isPositive()) params = ldlt.solve(rhs);
  if (params.size() != d + 1 || !params.allFinite()) params = gram.completeOrthogonalDecomposition().solve(rhs);
  if (!params.allFinite()) throw NumericalError("least-squares relaxation produced non-finite parameters");
  return LinearPredictor::from_stacked(params);
}

double FlippedRisk::risk() const {
  // (e_s / m_s) + (e_T / m_T) over the common denominator m_s m_T.
  const auto num = source_errors * reference_count + reference_errors * source_count;
  return static_cast<double>(num) / static_cast<double>(source_count * reference_count);
}

double FlippedRisk::discrepancy() const {
  // risk() is exactly 1.0 whenever the numerator equals the denominator.
  return std::clamp(1.0 - risk(), 0.0, 1.0);
}

std::size_t flipped_source_errors(const LinearPredictor& h, const Dataset& source) {
  // Against -y, so a correct prediction under the true label is an error here.
  return source.size() - count_errors(h, source);
}

FlippedRisk flipped_risk(const LinearPredictor& h, const Dataset& source, const Dataset& reference) {
  check_pair(source, reference);
  return {flipped_source_errors(h, source), count_errors(h, reference), source.size(), reference.size()};
}

DiscrepancyEstimate empirical_discrepancy(const Dataset& source, const Dataset& reference,
                                          const TrainConfig& relax_config) {
  relax_config.validate();
  const auto problem = build_flipped_problem(source, reference);
  const auto h = solve_weighted_least_squares(problem.samples, relax_config.ridge_strength);
  const auto r = flipped_risk(h, source, reference);
  return {r.discrepancy(), r.risk(), source.source_id()};
}

// ---------------------------------------------------------------------------
// Exact oracle

namespace {

// Per distinct input location: how many source/reference points sit there with each label.
struct Site {
  Eigen::VectorXd x;
  std::size_t source_pos = 0, source_neg = 0, reference_pos = 0, reference_neg = 0;
};

std::vector<Site> collect_sites(const Dataset& source, const Dataset& reference) {
  std::map<std::vector<double>, std::size_t> index;
  std::vector<Site> sites;
  auto add = [&](const Dataset& data, bool is_source) {
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto row = data.row(i);
      std::vector<double> key(row.data(), row.data() + row.size());
      auto [it, inserted] = index.emplace(key, sites.size());
      if (inserted) sites.push_back(Site{Eigen::Map<const Eigen::VectorXd>(key.data(), row.size()), 0, 0, 0, 0});
      auto& site = sites[it->second];
      const bool pos = data.label(i) == 1;
      if (is_source) (pos ? site.source_pos : site.source_neg)++;
      else (pos ? site.reference_pos : site.reference_neg)++;
    }
  };
  add(source, true);
  add(reference, false);
  return sites;
}

class GapTracker {
 public:
  GapTracker(const std::vector<Site>& sites, std::size_t ms, std::size_t mt) : sites_(sites), ms_(ms), mt_(mt) {}

  // labeling[k] is the prediction (+1/-1) at site k.
  void consider(const std::vector<int>& labeling) {
    long long es = 0, et = 0;
    for (std::size_t k = 0; k < sites_.size(); ++k) {
      const auto& s = sites_[k];
      if (labeling[k] == 1) {
        es += static_cast<long long>(s.source_neg);
        et += static_cast<long long>(s.reference_neg);
      } else {
        es += static_cast<long long>(s.source_pos);
        et += static_cast<long long>(s.reference_pos);
      }
    }
    const long long gap = es * static_cast<long long>(mt_) - et * static_cast<long long>(ms_);
    best_ = std::max(best_, gap < 0 ? -gap : gap);
  }

  void consider_both_orientations(std::vector<int>& labeling) {
    consider(labeling);
    for (auto& v : labeling) v = -v;
    consider(labeling);
  }

  double value() const { return static_cast<double>(best_) / static_cast<double>(ms_ * mt_); }

 private:
  const std::vector<Site>& sites_;
  std::size_t ms_, mt_;
  long long best_ = 0;
};

void enumerate_thresholds(const std::vector<Site>& sites, GapTracker& tracker) {
  std::vector<std::size_t> order(sites.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return sites[a].x[0] < sites[b].x[0]; });
  // Cut after the first `cut` sorted sites; cut = 0 and cut = n are the constants.
  std::vector<int> labeling(sites.size());
  for (std::size_t cut = 0; cut <= order.size(); ++cut) {
    for (std::size_t r = 0; r < order.size(); ++r) labeling[order[r]] = r < cut ? -1 : 1;
    tracker.consider_both_orientations(labeling);
  }
}

void enumerate_lines(const std::vector<Site>& sites, GapTracker& tracker) {
  const std::size_t n = sites.size();
  std::vector<int> labeling(n, 1);
  tracker.consider_both_orientations(labeling);

  std::vector<double> side(n);
  std::vector<std::pair<double, std::size_t>> on_line;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      const double dx = sites[q].x[0] - sites[p].x[0];
      const double dy = sites[q].x[1] - sites[p].x[1];
      on_line.clear();
      for (std::size_t r = 0; r < n; ++r) {
        const double rx = sites[r].x[0] - sites[p].x[0];
        const double ry = sites[r].x[1] - sites[p].x[1];
        side[r] = dx * ry - dy * rx;
        if (side[r] == 0.0) on_line.emplace_back(dx * rx + dy * ry, r);
      }
      std::sort(on_line.begin(), on_line.end());
      // A small rotation about a point of the line splits the collinear sites
      // by their position along it; either end can go to either side.
      for (std::size_t cut = 0; cut <= on_line.size(); ++cut) {
        for (int upper_side : {1, -1}) {
          for (std::size_t r = 0; r < n; ++r) labeling[r] = side[r] > 0.0 ? 1 : -1;
          for (std::size_t k = 0; k < on_line.size(); ++k) labeling[on_line[k].second] = k < cut ? -upper_side : upper_side;
          tracker.consider_both_orientations(labeling);
        }
      }
    }
  }
}

}  // namespace

double exact_discrepancy_oracle(const Dataset& source, const Dataset& reference, HypothesisFamily family) {
  check_pair(source, reference);
  const std::size_t want = family == HypothesisFamily::thresholds_1d ? 1 : 2;
  if (source.n_features() != want)
    throw std::invalid_argument("oracle family needs n_features == " + std::to_string(want));
  if (source.size() + reference.size() > kOracleMaxSamples)
    throw std::invalid_argument("oracle instance too large (limit " + std::to_string(kOracleMaxSamples) + " samples)");

  const auto sites = collect_sites(source, reference);
  GapTracker tracker(sites, source.size(), reference.size());
  if (family == HypothesisFamily::thresholds_1d) enumerate_thresholds(sites, tracker);
  else enumerate_lines(sites, tracker);
  return tracker.value();
}

}  // namespace msrobust
