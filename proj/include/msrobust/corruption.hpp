#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "msrobust/data.hpp"

namespace msrobust {

enum class CorruptionKind { label_bias, shuffled_labels, shuffled_features };

CorruptionKind corruption_kind_from_string(const std::string& name);
std::string to_string(CorruptionKind kind);

struct CorruptionSpec {
  CorruptionKind kind = CorruptionKind::shuffled_labels;
  double proportion = 1.0;  // p in (0, 1]
  std::uint64_t seed = 0;

  void validate() const;
};

void to_json(nlohmann::json& j, const CorruptionSpec& s);
void from_json(const nlohmann::json& j, CorruptionSpec& s);

/// ceil(p * n) with a small guard against 0.3 * 10 = 3.0000000000000004.
std::size_t corrupted_sample_count(std::size_t n, double proportion);

/// Indices of the samples a spec touches, ascending.
IndexList corrupted_samples(std::size_t n, const CorruptionSpec& spec);

/// Feature permutation used by shuffled_features: column c of the output is
/// column perm[c] of the input.
std::vector<std::size_t> feature_permutation(std::size_t n_features, const CorruptionSpec& spec);

/// label_bias sets the chosen labels to +1; shuffled_labels permutes the
/// chosen labels among themselves; shuffled_features applies one feature
/// permutation to every chosen row.
Dataset corrupt(const Dataset& data, const CorruptionSpec& spec);

struct CorruptedPool {
  SourcePool pool;
  IndexList corrupted_sources;  // ascending
};

/// Corrupts `n_corrupted` seed-chosen sources; source i uses spec.seed mixed
/// with i so every source is shuffled independently. The reference is untouched.
CorruptedPool corrupt_pool(const SourcePool& pool, std::size_t n_corrupted, const CorruptionSpec& spec,
                           std::uint64_t seed);

}  // namespace msrobust
