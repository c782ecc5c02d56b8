#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "msrobust/baselines.hpp"
#include "msrobust/corruption.hpp"
#include "msrobust/data.hpp"
#include "msrobust/linear.hpp"
#include "msrobust/weights.hpp"

namespace msrobust {

enum class Method {
  ours,
  reference_only,
  all_data,
  geometric_median,
  componentwise_median,
  median_of_probs,
  robust_loss,
  batch_norm,
};

Method method_from_string(const std::string& name);
std::string to_string(Method method);

/// Two isotropic Gaussian class clouds whose means are class_separation apart
/// along the diagonal. positive_fraction is the class prior of +1.
struct SyntheticSpec {
  std::size_t n_sources = 20;
  std::size_t samples_per_source = 100;
  std::size_t reference_size = 100;
  std::size_t test_size = 2000;
  std::size_t n_features = 2;
  double class_separation = 3.0;
  double positive_fraction = 0.5;

  void validate() const;
};

struct CsvDataSpec {
  std::vector<std::string> sources;
  std::string reference;
  std::string test;
  std::string label_column = "label";
  LabelEncoding encoding = LabelEncoding::signed_labels;
};

struct CorruptionSettings {
  CorruptionKind kind = CorruptionKind::shuffled_labels;
  std::vector<std::size_t> n_corrupted{0};
  double proportion = 1.0;
};

struct ExperimentConfig {
  std::variant<SyntheticSpec, CsvDataSpec> data = SyntheticSpec{};
  std::optional<CorruptionSettings> corruption;
  std::vector<Method> methods{Method::ours};
  std::vector<double> lambda_grid{0.0, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0};
  std::vector<double> ridge_grid{1e-4, 1e-3, 1e-2, 1e-1};
  std::size_t cv_folds = 5;
  std::size_t repeats = 1;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  TrainConfig train{};  // ridge_strength is overridden by the grid

  void validate() const;
  std::vector<std::size_t> corruption_grid() const;
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
void from_json(const nlohmann::json& j, ExperimentConfig& c);
ExperimentConfig load_experiment_config(const std::string& path);

struct Scenario {
  SourcePool pool;
  Dataset test;
  IndexList corrupted_sources;
};

/// Sources, reference and test set all drawn i.i.d. from the same clean distribution.
Scenario generate_synthetic_pool(const SyntheticSpec& spec, std::uint64_t seed);

/// Per-repeat seed; independent of method and corruption level so every
/// method sees the same data within a repeat.
std::uint64_t repeat_seed(std::uint64_t master_seed, std::size_t repeat);

/// Loads or generates the clean scenario for a repeat and applies the
/// configured corruption to n_corrupted sources.
Scenario build_scenario(const ExperimentConfig& config, std::uint64_t seed, std::size_t n_corrupted);

inline constexpr double kNotApplicable = std::numeric_limits<double>::quiet_NaN();

struct RunResult {
  Method method = Method::ours;
  std::size_t n_corrupted = 0;
  std::size_t repeat = 0;
  std::uint64_t seed = 0;
  double test_error = 0.0;
  double selected_lambda = kNotApplicable;
  double selected_ridge = kNotApplicable;
  std::optional<SimplexWeights> alpha;
  std::vector<double> discrepancies;
  double wall_time = 0.0;  // seconds; never written to result files
};

/// Final model of a method, able to score any dataset in the original input space.
struct FittedModel {
  std::vector<LinearPredictor> models;  // one, or the ensemble for median_of_probs
  bool median_vote = false;
  std::optional<NormalizationStats> input_stats;

  std::size_t count_errors(const Dataset& data) const;
  double error(const Dataset& data) const;
};

/// Robust pipeline: discrepancies against the reference, weights from the
/// convex program, alpha-weighted logistic regression over the sources plus
/// the reference (appended as the last source). lambda and the ridge are
/// chosen by k-fold CV on the reference.
RunResult run_ours(const SourcePool& pool, const Dataset& test, const ExperimentConfig& config, std::uint64_t seed,
                   FittedModel* model = nullptr);

/// Any method other than `ours`; the ridge is chosen by k-fold CV on the reference.
RunResult run_baseline(const SourcePool& pool, const Dataset& test, const ExperimentConfig& config, Method method,
                       std::uint64_t seed, FittedModel* model = nullptr);

RunResult run_method(const SourcePool& pool, const Dataset& test, const ExperimentConfig& config, Method method,
                     std::uint64_t seed, FittedModel* model = nullptr);

struct CellSummary {
  Method method;
  std::size_t n_corrupted;
  double mean_test_error;
  double std_test_error;  // sample standard deviation, 0 for a single repeat
  std::size_t count;
};

struct SweepResult {
  std::vector<RunResult> runs;  // ordered by method (config order), n_corrupted, repeat
  std::vector<CellSummary> summary;
};

/// methods x corruption grid x repeats.
SweepResult run_sweep(const ExperimentConfig& config);

std::vector<CellSummary> summarize(const std::vector<RunResult>& runs, const std::vector<Method>& methods,
                                   const std::vector<std::size_t>& corruption_grid);

/// Header: method,n_corrupted,repeat,seed,test_error,selected_lambda,selected_ridge
void write_results_csv(const SweepResult& result, std::ostream& out);
/// alpha vectors and discrepancies per run.
void write_results_sidecar(const SweepResult& result, std::ostream& out);
/// method,n_corrupted,mean_test_error,std_test_error,count
void write_summary_csv(const SweepResult& result, std::ostream& out);

}  // namespace msrobust
