#include <doctest.h>

#include <cmath>
#include <limits>

#include "msrobust/rng.hpp"
#include "msrobust/weights.hpp"

using namespace msrobust;

namespace {

// Exhaustive search over the simplex lattice with spacing `resolution` (N <= 3).
double grid_oracle(const WeightProblem& p, double resolution) {
  const int steps = static_cast<int>(std::lround(1.0 / resolution));
  double best = std::numeric_limits<double>::infinity();
  const auto n = p.discrepancies.size();
  if (n == 1) return weight_objective(p, std::vector<double>{1.0});
  for (int i = 0; i <= steps; ++i) {
    if (n == 2) {
      const double a = i * resolution;
      best = std::min(best, weight_objective(p, std::vector<double>{a, 1.0 - a}));
      continue;
    }
    for (int j = 0; i + j <= steps; ++j) {
      const double a = i * resolution, b = j * resolution;
      best = std::min(best, weight_objective(p, std::vector<double>{a, b, std::max(0.0, 1.0 - a - b)}));
    }
  }
  return best;
}

void check_simplex(const SimplexWeights& w) {
  double sum = 0.0;
  for (double a : w.values()) {
    CHECK(a >= 0.0);
    sum += a;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
}

}  // namespace

TEST_CASE("SimplexWeights validation") {
  CHECK_NOTHROW(SimplexWeights({0.25, 0.75}));
  CHECK(SimplexWeights({1.0 + 1e-13, -1e-13})[1] == 0.0);
  CHECK_THROWS_AS(SimplexWeights({0.5, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(SimplexWeights({1.1, -0.1}), std::invalid_argument);
  CHECK_THROWS_AS(SimplexWeights(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("project_simplex examples") {
  const std::vector<double> feasible{0.3, 0.7}, vertex{2.0, 0.0}, even{0.6, 0.6};
  auto p = project_simplex(feasible);
  CHECK(p[0] == doctest::Approx(0.3));
  CHECK(p[1] == doctest::Approx(0.7));
  p = project_simplex(vertex);
  CHECK(p[0] == 1.0);
  CHECK(p[1] == 0.0);
  p = project_simplex(even);
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[1] == doctest::Approx(0.5));

  const std::vector<double> bad{1.0, std::numeric_limits<double>::quiet_NaN()};
  CHECK_THROWS_AS(project_simplex(bad), std::invalid_argument);
}

TEST_CASE("project_simplex is the closest simplex point") {
  Rng rng(3);
  std::normal_distribution<double> g(0.0, 2.0);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> v{g(rng), g(rng), g(rng)};
    const auto p = project_simplex(v);
    check_simplex(p);
    auto dist = [&](const std::vector<double>& a) {
      double s = 0;
      for (int i = 0; i < 3; ++i) s += (a[i] - v[i]) * (a[i] - v[i]);
      return s;
    };
    const double d = dist(p.values());
    for (int i = 0; i <= 100; ++i)
      for (int j = 0; i + j <= 100; ++j) CHECK(d <= dist({i / 100.0, j / 100.0, (100 - i - j) / 100.0}) + 1e-12);
  }
}

TEST_CASE("solve_weights closed-form cases") {
  CHECK(solve_weights({{0.3}, {10}, 2.0}).values() == std::vector<double>{1.0});

  const auto w = solve_weights({{0.2, 0.2}, {100, 300}, 0.7});
  CHECK(w[0] == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(w[1] == doctest::Approx(0.75).epsilon(1e-6));

  const auto z = solve_weights({{0.1, 0.4}, {100, 100}, 0.0});
  CHECK(z.values() == std::vector<double>{1.0, 0.0});

  // lambda = 0 ties share in proportion to sample counts
  const auto tie = solve_weights({{0.1, 0.3, 0.1}, {10, 50, 30}, 0.0});
  CHECK(tie[0] == doctest::Approx(0.25));
  CHECK(tie[1] == 0.0);
  CHECK(tie[2] == doctest::Approx(0.75));
}

TEST_CASE("solve_weights matches the grid oracle on the three-source example") {
  const WeightProblem p{{0.1, 0.2, 0.3}, {50, 100, 200}, 0.5};
  const auto w = solve_weights(p);
  check_simplex(w);
  CHECK(weight_objective(p, w.values()) <= grid_oracle(p, 1e-3) + 1e-4);
}

TEST_CASE("solve_weights beats vertices, uniform and the grid on random problems") {
  Rng rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> count(10, 500), sources(1, 3);
  for (int t = 0; t < 40; ++t) {
    WeightProblem p;
    const auto n = sources(rng);
    for (std::size_t i = 0; i < n; ++i) {
      p.discrepancies.push_back(unit(rng));
      p.sample_counts.push_back(count(rng));
    }
    p.lambda = 10.0 * unit(rng);
    const auto w = solve_weights(p);
    check_simplex(w);
    const double f = weight_objective(p, w.values());
    for (std::size_t v = 0; v < n; ++v) {
      std::vector<double> e(n, 0.0);
      e[v] = 1.0;
      CHECK(f <= weight_objective(p, e) + 1e-12);
    }
    CHECK(f <= weight_objective(p, SimplexWeights::uniform(n).values()) + 1e-12);
    CHECK(f <= grid_oracle(p, 1e-2) + 1e-9);
  }
}

TEST_CASE("solution path limits") {
  // The distance to m/sum(m) at a finite lambda scales with the spread of d,
  // so the lambda = 1e3 check needs a narrow spread.
  const std::vector<double> d{0.1, 0.05, 0.12, 0.08};
  const std::vector<std::size_t> m{120, 40, 300, 75};
  const double total = 535.0;

  auto at0 = solve_weights({d, m, 0.0});
  CHECK(at0[1] == 1.0);

  auto big = solve_weights({d, m, 1e3});
  for (std::size_t i = 0; i < m.size(); ++i) CHECK(std::abs(big[i] - m[i] / total) <= 1e-3);

  auto huge = solve_weights({d, m, 1e9});
  for (std::size_t i = 0; i < m.size(); ++i) CHECK(std::abs(huge[i] - m[i] / total) <= 1e-6);

  // Mass on the best source shrinks as lambda grows.
  double previous = 1.0;
  for (double lambda : {1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0, 1000.0}) {
    const auto w = solve_weights({d, m, lambda});
    check_simplex(w);
    CHECK(w[1] <= previous + 1e-9);
    previous = w[1];
  }
}

TEST_CASE("WeightProblem validation") {
  CHECK_THROWS_AS(solve_weights({{0.1, 0.2}, {10}, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(solve_weights({{0.1}, {0}, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(solve_weights({{1.5}, {10}, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(solve_weights({{0.1}, {10}, -1.0}), std::invalid_argument);
}

TEST_CASE("excess_risk_bound") {
  BoundInputs in{SimplexWeights({0.5, 0.5}), {0.0, 0.0}, {100, 100}, {0.1, 0.1}, 1.0, 0.05};
  // 0.4 + 6 sqrt(ln(80)/2) sqrt(0.005), evaluated with mpmath at 40 digits
  CHECK(excess_risk_bound(in) == doctest::Approx(1.0279987238208764).epsilon(1e-13));

  BoundInputs vanishing{SimplexWeights({0.5, 0.5}), {0.0, 0.0}, {1'000'000'000, 1'000'000'000}, {0.0, 0.0}, 1.0, 0.05};
  CHECK(excess_risk_bound(vanishing) < 1e-3);

  BoundInputs shifted = in;
  shifted.discrepancies = {0.2, 0.4};
  BoundInputs doubled = shifted;
  doubled.discrepancies = {0.4, 0.8};
  // doubling adds 2 * sum a_i d_i = 2 * 0.3
  CHECK(excess_risk_bound(doubled) - excess_risk_bound(shifted) == doctest::Approx(0.6).epsilon(1e-12));

  BoundInputs bad = in;
  bad.delta = 1.0;
  CHECK_THROWS_AS(excess_risk_bound(bad), std::invalid_argument);
  bad = in;
  bad.loss_bound = 0.0;
  CHECK_THROWS_AS(excess_risk_bound(bad), std::invalid_argument);
  bad = in;
  bad.sample_counts = {100};
  CHECK_THROWS_AS(excess_risk_bound(bad), std::invalid_argument);
}

TEST_CASE("linear_rademacher_bound") {
  CHECK(linear_rademacher_bound(1, 1, 100) == doctest::Approx(0.1));
  CHECK(linear_rademacher_bound(2, 3, 36) == doctest::Approx(1.0));
  CHECK(linear_rademacher_bound(1.7, 0.4, 400) == doctest::Approx(2.0 * linear_rademacher_bound(1.7, 0.4, 1600)));
  CHECK_THROWS_AS(linear_rademacher_bound(0, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(linear_rademacher_bound(1, 1, 0), std::invalid_argument);
}
