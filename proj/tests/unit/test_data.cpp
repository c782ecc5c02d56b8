#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>

#include "helpers.hpp"
#include "msrobust/data.hpp"

using namespace msrobust;
using msrobust::testing::TempDir;

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

std::vector<std::size_t> flatten(const std::vector<IndexList>& parts) {
  std::vector<std::size_t> all;
  for (const auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  std::sort(all.begin(), all.end());
  return all;
}

std::vector<std::size_t> iota_n(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

}  // namespace

TEST_CASE("Dataset construction enforces invariants") {
  Matrix x(2, 2);
  x << 1, 2, 3, 4;
  CHECK_NOTHROW(Dataset(x, {1, -1}));
  CHECK_THROWS_AS(Dataset(x, {1}), InvalidData);
  CHECK_THROWS_AS(Dataset(x, {1, 0}), InvalidData);
  CHECK_THROWS_AS(Dataset(Matrix(2, 0), {1, -1}), InvalidData);

  Matrix bad = x;
  bad(1, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(Dataset(bad, {1, -1}), InvalidData);
  bad(1, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(Dataset(bad, {1, -1}), InvalidData);
}

TEST_CASE("SourcePool rejects mismatched or empty datasets") {
  const auto a = testing::random_dataset(5, 2, 1);
  const auto b = testing::random_dataset(5, 3, 2);
  CHECK_THROWS_AS(SourcePool({}, a), InvalidData);
  CHECK_THROWS_AS(SourcePool({b}, a), InvalidData);
  CHECK_THROWS_AS(SourcePool({a.subset(IndexList{})}, a), InvalidData);
  SourcePool pool({a, a}, a);
  CHECK(pool.sample_counts() == std::vector<std::size_t>{5, 5});
  CHECK(pool.with_reference_as_source().n_sources() == 3);
}

TEST_CASE("load_csv with 0/1 encoding maps 0 to -1") {
  TempDir dir;
  const auto path = dir.path() / "three.csv";
  write_file(path, "# comment line\nf1,f2,label\n0.5,1,1\n-2,3.25,0\n# another\n7,8,1\n");
  const auto data = load_csv(path, "label", LabelEncoding::zero_one);
  CHECK(data.labels() == std::vector<int>{1, -1, 1});
  CHECK(data.n_features() == 2);
  CHECK(data.features()(1, 1) == 3.25);
  CHECK(data.features()(2, 0) == 7.0);
}

TEST_CASE("load_csv reports distinct errors naming row and column") {
  TempDir dir;

  SUBCASE("missing file") {
    try {
      load_csv(dir.path() / "nope.csv");
      FAIL("expected an error");
    } catch (const CsvError& e) {
      CHECK(e.kind() == CsvError::Kind::missing_file);
    }
  }
  SUBCASE("non-numeric cell in row 2") {
    const auto p = dir.path() / "bad.csv";
    write_file(p, "a,b,label\n1,2,1\n3,oops,-1\n");
    try {
      load_csv(p);
      FAIL("expected an error");
    } catch (const CsvError& e) {
      CHECK(e.kind() == CsvError::Kind::bad_number);
      CHECK(e.row() == 2);
      CHECK(e.column() == "b");
      CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
  }
  SUBCASE("label outside encoding") {
    const auto p = dir.path() / "label.csv";
    write_file(p, "a,label\n1,1\n2,2\n");
    try {
      load_csv(p);
      FAIL("expected an error");
    } catch (const CsvError& e) {
      CHECK(e.kind() == CsvError::Kind::bad_label);
      CHECK(e.row() == 2);
      CHECK(e.column() == "label");
    }
    // 0 is not a signed label either
    write_file(p, "a,label\n1,0\n");
    CHECK_THROWS_AS(load_csv(p), CsvError);
  }
  SUBCASE("ragged row") {
    const auto p = dir.path() / "ragged.csv";
    write_file(p, "a,b,label\n1,2,1\n1,-1\n");
    try {
      load_csv(p);
      FAIL("expected an error");
    } catch (const CsvError& e) {
      CHECK(e.kind() == CsvError::Kind::ragged_row);
      CHECK(e.row() == 2);
    }
  }
  SUBCASE("missing label column") {
    const auto p = dir.path() / "nolabel.csv";
    write_file(p, "a,b\n1,2\n");
    try {
      load_csv(p, "y");
      FAIL("expected an error");
    } catch (const CsvError& e) {
      CHECK(e.kind() == CsvError::Kind::missing_column);
      CHECK(e.column() == "y");
    }
  }
}

TEST_CASE("save_csv then load_csv round-trips a random 10x4 dataset") {
  TempDir dir;
  Rng rng(2024);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  Matrix x(10, 4);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = u(rng) / 7.0;
  std::vector<int> y;
  for (int i = 0; i < 10; ++i) y.push_back(i % 3 == 0 ? 1 : -1);
  const Dataset original(x, y);

  for (auto enc : {LabelEncoding::signed_labels, LabelEncoding::zero_one}) {
    const auto p = dir.path() / "rt.csv";
    save_csv(original, p, "label", enc);
    const auto back = load_csv(p, "label", enc);
    CHECK(back.labels() == original.labels());
    CHECK((back.features() - original.features()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("split is a deterministic disjoint partition") {
  const auto data = testing::random_dataset(10, 2, 5);
  const std::vector<double> halves{0.5, 0.5};
  CHECK(split_indices(10, halves, 7) == split_indices(10, halves, 7));

  const std::vector<double> whole{1.0};
  const auto single = split(data, whole, 3);
  REQUIRE(single.size() == 1);
  CHECK(single[0].size() == 10);

  const std::vector<double> f{0.2, 0.8};
  const auto parts = split_indices(100, f, 3);
  CHECK(parts[0].size() == 20);
  CHECK(parts[1].size() == 80);
  CHECK(flatten(parts) == iota_n(100));
}

TEST_CASE("split uses largest-remainder sizes") {
  const std::vector<double> thirds{1.0 / 3, 1.0 / 3, 1.0 / 3};
  auto parts = split_indices(10, thirds, 1);
  // 3.33 each: one leftover goes to the first part
  CHECK(parts[0].size() == 4);
  CHECK(parts[1].size() == 3);
  CHECK(parts[2].size() == 3);

  // quotas 2.5, 2.5, 5: equal remainders, earlier part wins
  const std::vector<double> quarters{0.25, 0.25, 0.5};
  parts = split_indices(10, quarters, 1);
  CHECK(parts[0].size() == 3);
  CHECK(parts[1].size() == 2);
  CHECK(parts[2].size() == 5);
  CHECK(flatten(parts) == iota_n(10));
}

TEST_CASE("split rejects invalid fractions") {
  const std::vector<double> bad_sum{0.5, 0.4};
  const std::vector<double> negative{1.5, -0.5};
  const std::vector<double> three{0.4, 0.3, 0.3};
  CHECK_THROWS_AS(split_indices(10, bad_sum, 1), std::invalid_argument);
  CHECK_THROWS_AS(split_indices(10, negative, 1), std::invalid_argument);
  CHECK_THROWS_AS(split_indices(2, three, 1), std::invalid_argument);
}

TEST_CASE("kfold_indices partitions with balanced sizes") {
  auto folds = kfold_indices(10, 5, 11);
  REQUIRE(folds.size() == 5);
  for (const auto& f : folds) CHECK(f.size() == 2);
  CHECK(flatten(folds) == iota_n(10));

  folds = kfold_indices(11, 5, 11);
  std::multiset<std::size_t> sizes;
  for (const auto& f : folds) sizes.insert(f.size());
  CHECK(sizes == std::multiset<std::size_t>{2, 2, 2, 2, 3});
  CHECK(flatten(folds) == iota_n(11));

  CHECK(kfold_indices(37, 5, 99) == kfold_indices(37, 5, 99));
  CHECK(kfold_indices(37, 5, 99) != kfold_indices(37, 5, 98));
  CHECK_THROWS_AS(kfold_indices(3, 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(kfold_indices(3, 1, 1), std::invalid_argument);
}

TEST_CASE("split and kfold outputs are permutations for many shapes") {
  for (std::size_t n = 5; n < 60; n += 7) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      CHECK(flatten(kfold_indices(n, 5, seed)) == iota_n(n));
      const std::vector<double> f{0.1, 0.3, 0.6};
      CHECK(flatten(split_indices(n, f, seed)) == iota_n(n));
      const auto fold = kfold_indices(n, 5, seed)[0];
      auto rest = complement_indices(n, fold);
      rest.insert(rest.end(), fold.begin(), fold.end());
      std::sort(rest.begin(), rest.end());
      CHECK(rest == iota_n(n));
    }
  }
}
