#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "msrobust/data.hpp"
#include "msrobust/rng.hpp"

namespace msrobust::testing {

inline Dataset random_dataset(std::size_t n, std::size_t d, std::uint64_t seed, double shift = 0.0,
                              std::string id = "random") {
  Rng rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = coin(rng) ? 1 : -1;
    for (std::size_t c = 0; c < d; ++c)
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = noise(rng) + shift * y[i];
  }
  return Dataset(std::move(x), std::move(y), std::move(id));
}

inline SourcePool random_pool(std::size_t n_sources, std::size_t m, std::size_t d, std::uint64_t seed,
                              double shift = 1.0) {
  std::vector<Dataset> sources;
  for (std::size_t i = 0; i < n_sources; ++i)
    sources.push_back(random_dataset(m + 7 * i, d, derive_seed(seed, i), shift, "s" + std::to_string(i)));
  return SourcePool(std::move(sources), random_dataset(m, d, derive_seed(seed, 999), shift, "reference"));
}

inline Dataset from_rows(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels) {
  Matrix x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return Dataset(std::move(x), labels);
}

/// Scratch directory removed on scope exit.
class TempDir {
 public:
  TempDir() {
    path_ = std::filesystem::temp_directory_path() /
            ("msrobust_test_" + std::to_string(std::random_device{}()) + "_" + std::to_string(counter()++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::filesystem::path path_;
};

}  // namespace msrobust::testing
