#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "helpers.hpp"
#include "msrobust/discrepancy.hpp"

using namespace msrobust;
using msrobust::testing::from_rows;
using msrobust::testing::random_dataset;

namespace {

// Brute force over every 1-D threshold and orientation, written without the library oracle.
double threshold_sup(const Dataset& a, const Dataset& b) {
  std::vector<double> cuts{-1e300, 1e300};
  for (const auto* d : {&a, &b})
    for (std::size_t i = 0; i < d->size(); ++i) cuts.push_back(d->features()(static_cast<Eigen::Index>(i), 0));
  std::sort(cuts.begin(), cuts.end());
  double best = 0.0;
  auto err = [](const Dataset& d, double t, int sign) {
    int wrong = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      const int pred = d.features()(static_cast<Eigen::Index>(i), 0) >= t ? sign : -sign;
      wrong += pred != d.label(i);
    }
    return static_cast<double>(wrong) / static_cast<double>(d.size());
  };
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double t = cuts[k] == cuts[k + 1] ? cuts[k] : 0.5 * (cuts[k] + cuts[k + 1]);
    for (int sign : {1, -1}) {
      best = std::max(best, std::abs(err(a, t, sign) - err(b, t, sign)));
      best = std::max(best, std::abs(err(a, cuts[k], sign) - err(b, cuts[k], sign)));
    }
  }
  return best;
}

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto i, auto j) { return v[i] < v[j]; });
  std::vector<double> r(v.size());
  for (std::size_t k = 0; k < order.size();) {
    std::size_t e = k;
    while (e + 1 < order.size() && v[order[e + 1]] == v[order[k]]) ++e;
    for (std::size_t q = k; q <= e; ++q) r[order[q]] = 0.5 * static_cast<double>(k + e);
    k = e + 1;
  }
  return r;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ra = ranks(a), rb = ranks(b);
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / static_cast<double>(ra.size());
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / static_cast<double>(rb.size());
  double num = 0, da = 0, db = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    num += (ra[i] - ma) * (rb[i] - mb);
    da += (ra[i] - ma) * (ra[i] - ma);
    db += (rb[i] - mb) * (rb[i] - mb);
  }
  return num / std::sqrt(da * db);
}

Dataset flip_all(const Dataset& d) {
  auto y = d.labels();
  for (int& v : y) v = -v;
  return d.with_labels(std::move(y));
}

}  // namespace

TEST_CASE("a dataset has zero discrepancy with itself") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = random_dataset(20 + seed, 1 + seed % 4, seed, 0.5 * static_cast<double>(seed % 3));
    const auto est = empirical_discrepancy(s, s);
    CHECK(est.value == 0.0);
    CHECK(est.solver_risk == 1.0);
  }
}

TEST_CASE("fully flipped separable reference gives discrepancy one") {
  const auto ref = from_rows({{-2, 0}, {-1, 1}, {-1.5, -1}, {1, 0.5}, {2, -1}, {1.5, 2}}, {-1, -1, -1, 1, 1, 1});
  const auto est = empirical_discrepancy(flip_all(ref), ref);
  CHECK(est.value == 1.0);
  CHECK(est.solver_risk == 0.0);
  CHECK(exact_discrepancy_oracle(flip_all(ref), ref, HypothesisFamily::lines_2d) == 1.0);
}

TEST_CASE("the 1-D worked instance") {
  const auto ref = from_rows({{0}, {1}}, {-1, 1});
  const auto src = from_rows({{0}, {1}}, {-1, -1});
  CHECK(std::abs(exact_discrepancy_oracle(src, ref, HypothesisFamily::thresholds_1d) - 0.5) <= 1e-12);
  CHECK(threshold_sup(src, ref) == 0.5);
  const auto est = empirical_discrepancy(src, ref);
  CHECK(est.value >= 0.0);
  CHECK(est.value <= 0.5);
}

TEST_CASE("estimates stay in the unit interval and match their solver risk") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto a = random_dataset(15 + seed, 3, seed, 1.0);
    const auto b = random_dataset(40, 3, seed + 1000, seed % 2 ? -1.0 : 1.0);
    const auto est = empirical_discrepancy(a, b);
    CHECK(est.value >= 0.0);
    CHECK(est.value <= 1.0);
    CHECK(est.value == std::clamp(1.0 - est.solver_risk, 0.0, 1.0));
  }
}

TEST_CASE("flipped risk counts agree with a direct evaluation") {
  const auto a = random_dataset(17, 2, 1, 1.0);
  const auto b = random_dataset(23, 2, 2, 1.0);
  LinearPredictor h{Vector::Ones(2), -0.1};
  const auto r = flipped_risk(h, a, b);
  CHECK(r.source_errors == a.size() - count_errors(h, a));
  CHECK(r.reference_errors == count_errors(h, b));
  CHECK(r.risk() == doctest::Approx(static_cast<double>(r.source_errors) / 17.0 +
                                    static_cast<double>(r.reference_errors) / 23.0));
}

TEST_CASE("the exact least-squares solve satisfies the normal equations") {
  const auto problem = build_flipped_problem(random_dataset(30, 3, 4, 1.0), random_dataset(20, 3, 5, 1.0));
  CHECK(problem.source_count == 30);
  CHECK(problem.reference_count == 20);
  CHECK(problem.samples.weights[0] == doctest::Approx(1.0 / 30));
  CHECK(problem.samples.weights[49] == doctest::Approx(1.0 / 20));
  const double ridge = 1e-3;
  const auto h = solve_weighted_least_squares(problem.samples, ridge);
  const auto& s = problem.samples;
  Vector gw = ridge * h.weights;
  double gb = 0.0;
  for (Eigen::Index j = 0; j < s.features.rows(); ++j) {
    const double r = s.features.row(j).dot(h.weights) + h.bias - s.labels[static_cast<std::size_t>(j)];
    gw += s.weights[j] * r * s.features.row(j).transpose();
    gb += s.weights[j] * r;
  }
  CHECK(gw.norm() <= 1e-10);
  CHECK(std::abs(gb) <= 1e-10);
}

TEST_CASE("oracle symmetry and agreement with an independent threshold scan") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto a = random_dataset(5 + seed % 7, 1, seed, 0.8);
    const auto b = random_dataset(9, 1, seed + 50, seed % 2 ? 0.0 : 1.5);
    const double ab = exact_discrepancy_oracle(a, b, HypothesisFamily::thresholds_1d);
    CHECK(ab == exact_discrepancy_oracle(b, a, HypothesisFamily::thresholds_1d));
    CHECK(ab == doctest::Approx(threshold_sup(a, b)).epsilon(1e-15));

    const auto c = random_dataset(8, 2, seed + 7, 1.0);
    const auto e = random_dataset(11, 2, seed + 70, -0.5);
    CHECK(exact_discrepancy_oracle(c, e, HypothesisFamily::lines_2d) ==
          exact_discrepancy_oracle(e, c, HypothesisFamily::lines_2d));
    CHECK(exact_discrepancy_oracle(c, c, HypothesisFamily::lines_2d) == 0.0);
  }
}

TEST_CASE("oracle containment between families") {
  // Lines in 2-D include every threshold on the first coordinate.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto a = random_dataset(10, 2, seed, 1.0);
    const auto b = random_dataset(12, 2, seed + 9, 0.0);
    Matrix xa = a.features().col(0), xb = b.features().col(0);
    const Dataset a1(xa, a.labels()), b1(xb, b.labels());
    CHECK(exact_discrepancy_oracle(a, b, HypothesisFamily::lines_2d) >=
          exact_discrepancy_oracle(a1, b1, HypothesisFamily::thresholds_1d));
  }
}

TEST_CASE("relaxed estimate tracks the oracle on small 2-D instances") {
  std::vector<double> relaxed, exact;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    // Vary the shift so the pairs span a range of true discrepancies.
    const double shift = static_cast<double>(seed % 5) * 0.6;
    const auto ref = random_dataset(15, 2, seed, 1.5);
    auto src = random_dataset(15, 2, seed + 500, 1.5);
    if (seed % 2) src = flip_all(src);
    Matrix x = src.features();
    x.col(0).array() += shift;
    src = src.with_features(x);
    const double d = empirical_discrepancy(src, ref).value;
    const double o = exact_discrepancy_oracle(src, ref, HypothesisFamily::lines_2d);
    CHECK(d <= o + 1e-12);
    CHECK(d <= o + 0.15);
    relaxed.push_back(d);
    exact.push_back(o);
  }
  CHECK(spearman(relaxed, exact) > 0.0);
}

TEST_CASE("discrepancy errors") {
  const auto a = random_dataset(5, 2, 1);
  const auto b = random_dataset(5, 3, 2);
  CHECK_THROWS_AS(empirical_discrepancy(a, b), std::invalid_argument);
  CHECK_THROWS_AS(empirical_discrepancy(a.subset(IndexList{}), a), std::invalid_argument);
  CHECK_THROWS_AS(exact_discrepancy_oracle(a, a, HypothesisFamily::thresholds_1d), std::invalid_argument);
  CHECK_THROWS_AS(exact_discrepancy_oracle(b, b, HypothesisFamily::lines_2d), std::invalid_argument);
  const auto big = random_dataset(150, 2, 3);
  CHECK_THROWS_AS(exact_discrepancy_oracle(big, big, HypothesisFamily::lines_2d), std::invalid_argument);
}
