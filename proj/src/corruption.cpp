#include "msrobust/corruption.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "msrobust/rng.hpp"

namespace msrobust {

namespace {
constexpr std::uint64_t kSubsetStream = 1;
constexpr std::uint64_t kShuffleStream = 2;
}  // namespace

CorruptionKind corruption_kind_from_string(const std::string& name) {
  if (name == "label_bias") return CorruptionKind::label_bias;
  if (name == "shuffled_labels") return CorruptionKind::shuffled_labels;
  if (name == "shuffled_features") return CorruptionKind::shuffled_features;
  throw std::invalid_argument("unknown corruption kind '" + name + "'");
}

std::string to_string(CorruptionKind kind) {
  switch (kind) {
    case CorruptionKind::label_bias: return "label_bias";
    case CorruptionKind::shuffled_labels: return "shuffled_labels";
    case CorruptionKind::shuffled_features: return "shuffled_features";
  }
  return "?";
}

void CorruptionSpec::validate() const {
  if (!(proportion > 0.0 && proportion <= 1.0)) throw std::invalid_argument("corruption proportion must lie in (0,1]");
}

void to_json(nlohmann::json& j, const CorruptionSpec& s) {
  j = nlohmann::json{{"kind", to_string(s.kind)}, {"proportion", s.proportion}, {"seed", s.seed}};
}

void from_json(const nlohmann::json& j, CorruptionSpec& s) {
  s.kind = corruption_kind_from_string(j.at("kind").get<std::string>());
  s.proportion = j.value("proportion", 1.0);
  s.seed = j.value("seed", std::uint64_t{0});
  s.validate();
}

std::size_t corrupted_sample_count(std::size_t n, double proportion) {
  const auto k = static_cast<std::size_t>(std::ceil(proportion * static_cast<double>(n) - 1e-9));
  return std::min(k, n);
}

IndexList corrupted_samples(std::size_t n, const CorruptionSpec& spec) {
  spec.validate();
  const auto k = corrupted_sample_count(n, spec.proportion);
  if (k == n) {
    IndexList all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    return all;
  }
  Rng rng(derive_seed(spec.seed, kSubsetStream));
  auto perm = random_permutation(n, rng);
  IndexList chosen(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

std::vector<std::size_t> feature_permutation(std::size_t n_features, const CorruptionSpec& spec) {
  Rng rng(derive_seed(spec.seed, kShuffleStream));
  return random_permutation(n_features, rng);
}

Dataset corrupt(const Dataset& data, const CorruptionSpec& spec) {
  const auto chosen = corrupted_samples(data.size(), spec);
  switch (spec.kind) {
    case CorruptionKind::label_bias: {
      auto labels = data.labels();
      for (auto i : chosen) labels[i] = 1;
      return data.with_labels(std::move(labels));
    }
    case CorruptionKind::shuffled_labels: {
      Rng rng(derive_seed(spec.seed, kShuffleStream));
      const auto perm = random_permutation(chosen.size(), rng);
      auto labels = data.labels();
      for (std::size_t k = 0; k < chosen.size(); ++k) labels[chosen[k]] = data.label(chosen[perm[k]]);
      return data.with_labels(std::move(labels));
    }
    case CorruptionKind::shuffled_features: {
      const auto perm = feature_permutation(data.n_features(), spec);
      Matrix x = data.features();
      for (auto i : chosen) {
        const auto r = static_cast<Eigen::Index>(i);
        for (std::size_t c = 0; c < perm.size(); ++c)
          x(r, static_cast<Eigen::Index>(c)) = data.features()(r, static_cast<Eigen::Index>(perm[c]));
      }
      return data.with_features(std::move(x));
    }
  }
  return data;
}

CorruptedPool corrupt_pool(const SourcePool& pool, std::size_t n_corrupted, const CorruptionSpec& spec,
                           std::uint64_t seed) {
  spec.validate();
  if (n_corrupted > pool.n_sources())
    throw std::invalid_argument("cannot corrupt " + std::to_string(n_corrupted) + " of " +
                                std::to_string(pool.n_sources()) + " sources");
  // Prefixes of one permutation, so the corrupted sets are nested in n.
  Rng rng(seed);
  const auto order = random_permutation(pool.n_sources(), rng);
  IndexList touched(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_corrupted));
  std::sort(touched.begin(), touched.end());

  auto sources = pool.sources();
  for (auto i : touched) {
    CorruptionSpec per_source = spec;
    per_source.seed = derive_seed(spec.seed, 1000 + i);
    sources[i] = corrupt(sources[i], per_source);
  }
  return {pool.with_sources(std::move(sources)), std::move(touched)};
}

}  // namespace msrobust
