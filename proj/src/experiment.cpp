#include "msrobust/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "msrobust/discrepancy.hpp"
#include "msrobust/rng.hpp"

namespace msrobust {

namespace {

constexpr std::uint64_t kDataStream = 1;
constexpr std::uint64_t kCorruptionSpecStream = 2;
constexpr std::uint64_t kCorruptionChoiceStream = 3;
constexpr std::uint64_t kCvStream = 4;

const std::vector<std::pair<Method, const char*>> kMethodNames = {
    {Method::ours, "ours"},
    {Method::reference_only, "reference_only"},
    {Method::all_data, "all_data"},
    {Method::geometric_median, "geometric_median"},
    {Method::componentwise_median, "componentwise_median"},
    {Method::median_of_probs, "median_of_probs"},
    {Method::robust_loss, "robust_loss"},
    {Method::batch_norm, "batch_norm"},
};

std::string g17(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> sorted_grid(std::vector<double> grid) {
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

TrainConfig with_ridge(TrainConfig base, double ridge) {
  base.ridge_strength = ridge;
  return base;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct Fold {
  Dataset train_reference;
  Dataset validation;
};

std::vector<Fold> make_folds(const Dataset& reference, std::size_t k, std::uint64_t seed) {
  std::vector<Fold> folds;
  for (const auto& held : kfold_indices(reference.size(), k, seed)) {
    const auto kept = complement_indices(reference.size(), held);
    folds.push_back({reference.subset(kept), reference.subset(held)});
  }
  return folds;
}

// Everything `ours` needs that does not depend on (lambda, ridge).
struct OursPrepared {
  SourcePool extended;  // sources followed by the reference
  std::vector<double> discrepancies;
  std::vector<std::size_t> counts;
};

OursPrepared prepare_ours(const SourcePool& pool) {
  OursPrepared p{pool.with_reference_as_source(), {}, {}};
  for (const auto& s : p.extended.sources()) {
    p.discrepancies.push_back(empirical_discrepancy(s, pool.reference()).value);
    p.counts.push_back(s.size());
  }
  return p;
}

SimplexWeights ours_weights(const OursPrepared& p, double lambda) {
  return solve_weights(WeightProblem{p.discrepancies, p.counts, lambda});
}

// Source-only local models for one ridge value; they do not change across folds.
std::vector<LinearPredictor> source_local_models(const SourcePool& pool, const TrainConfig& config) {
  return train_local_models(pool, config);
}

bool uses_local_models(Method m) {
  return m == Method::geometric_median || m == Method::componentwise_median || m == Method::median_of_probs;
}

FittedModel fit_baseline(Method method, const SourcePool& pool, const TrainConfig& config,
                         const std::vector<LinearPredictor>* source_models) {
  FittedModel fitted;
  switch (method) {
    case Method::reference_only:
      fitted.models.push_back(train_erm(pool.reference(), Loss::logistic, config));
      break;
    case Method::all_data:
    case Method::robust_loss: {
      const auto merged = pool.with_reference_as_source();
      const auto alpha = SimplexWeights::proportional(merged.sample_counts());
      const Loss loss = method == Method::all_data ? Loss::logistic : Loss::huber_logistic;
      fitted.models.push_back(train_weighted_erm(merged, alpha, loss, config));
      break;
    }
    case Method::geometric_median:
    case Method::componentwise_median:
    case Method::median_of_probs: {
      std::vector<LinearPredictor> local =
          source_models ? *source_models : source_local_models(pool, config);
      local.push_back(train_erm(pool.reference(), Loss::logistic, config));
      if (method == Method::median_of_probs) {
        fitted.models = std::move(local);
        fitted.median_vote = true;
      } else if (method == Method::geometric_median) {
        fitted.models.push_back(aggregate_geometric_median(local));
      } else {
        fitted.models.push_back(aggregate_componentwise_median(local));
      }
      break;
    }
    case Method::batch_norm: {
      std::vector<Dataset> normalized;
      for (const auto& s : pool.sources()) normalized.push_back(apply_normalization(s, fit_normalization(s)));
      const auto reference_stats = fit_normalization(pool.reference());
      normalized.push_back(apply_normalization(pool.reference(), reference_stats));
      std::vector<std::size_t> counts;
      for (const auto& s : normalized) counts.push_back(s.size());
      SourcePool merged(std::move(normalized), apply_normalization(pool.reference(), reference_stats));
      fitted.models.push_back(
          train_weighted_erm(merged, SimplexWeights::proportional(counts), Loss::logistic, config));
      fitted.input_stats = reference_stats;
      break;
    }
    case Method::ours:
      throw std::invalid_argument("fit_baseline called with method 'ours'");
  }
  return fitted;
}

}  // namespace

Method method_from_string(const std::string& name) {
  for (const auto& [m, n] : kMethodNames)
    if (name == n) return m;
  throw std::invalid_argument("unknown method '" + name + "'");
}

std::string to_string(Method method) {
  for (const auto& [m, n] : kMethodNames)
    if (m == method) return n;
  return "?";
}

void SyntheticSpec::validate() const {
  if (n_sources == 0 || samples_per_source == 0 || reference_size == 0 || test_size == 0 || n_features == 0)
    throw std::invalid_argument("synthetic spec has a zero-sized component");
  if (!(class_separation >= 0.0) || !std::isfinite(class_separation))
    throw std::invalid_argument("class_separation must be finite and >= 0");
  if (!(positive_fraction > 0.0 && positive_fraction < 1.0))
    throw std::invalid_argument("positive_fraction must lie in (0,1)");
}

void ExperimentConfig::validate() const {
  if (const auto* s = std::get_if<SyntheticSpec>(&data)) s->validate();
  if (const auto* c = std::get_if<CsvDataSpec>(&data); c && (c->sources.empty() || c->reference.empty() || c->test.empty()))
    throw std::invalid_argument("csv data needs sources, reference and test paths");
  if (methods.empty()) throw std::invalid_argument("no methods configured");
  if (lambda_grid.empty() || ridge_grid.empty()) throw std::invalid_argument("hyperparameter grids must be nonempty");
  for (double l : lambda_grid)
    if (!(l >= 0.0) || !std::isfinite(l)) throw std::invalid_argument("lambda grid values must be finite and >= 0");
  for (double r : ridge_grid)
    if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument("ridge grid values must be finite and >= 0");
  if (cv_folds < 2) throw std::invalid_argument("cv_folds must be >= 2");
  if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
  if (corruption) {
    CorruptionSpec{corruption->kind, corruption->proportion, 0}.validate();
    if (corruption->n_corrupted.empty()) throw std::invalid_argument("corruption.n_corrupted is empty");
    const std::size_t n_sources = std::holds_alternative<SyntheticSpec>(data)
                                      ? std::get<SyntheticSpec>(data).n_sources
                                      : std::get<CsvDataSpec>(data).sources.size();
    for (auto n : corruption->n_corrupted)
      if (n > n_sources) throw std::invalid_argument("corruption.n_corrupted exceeds the number of sources");
  }
  train.validate();
}

std::vector<std::size_t> ExperimentConfig::corruption_grid() const {
  if (!corruption) return {0};
  return corruption->n_corrupted;
}

// ---------------------------------------------------------------------------
// Config JSON

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  j = nlohmann::json::object();
  if (const auto* s = std::get_if<SyntheticSpec>(&c.data)) {
    j["data"]["synthetic"] = {{"n_sources", s->n_sources},
                              {"samples_per_source", s->samples_per_source},
                              {"reference_size", s->reference_size},
                              {"test_size", s->test_size},
                              {"n_features", s->n_features},
                              {"class_separation", s->class_separation},
                              {"positive_fraction", s->positive_fraction}};
  } else {
    const auto& p = std::get<CsvDataSpec>(c.data);
    j["data"]["csv_paths"] = {{"sources", p.sources},
                              {"reference", p.reference},
                              {"test", p.test},
                              {"label_column", p.label_column},
                              {"label_encoding", p.encoding == LabelEncoding::zero_one ? "zero_one" : "signed"}};
  }
  if (c.corruption) {
    j["corruption"] = {{"kind", to_string(c.corruption->kind)},
                       {"n_corrupted", c.corruption->n_corrupted},
                       {"proportion", c.corruption->proportion}};
  }
  std::vector<std::string> methods;
  for (auto m : c.methods) methods.push_back(to_string(m));
  j["methods"] = methods;
  j["lambda_grid"] = c.lambda_grid;
  j["ridge_grid"] = c.ridge_grid;
  j["cv_folds"] = c.cv_folds;
  j["repeats"] = c.repeats;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["train"] = {{"max_iterations", c.train.max_iterations}, {"tolerance", c.train.tolerance}};
}

void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  c = ExperimentConfig{};
  const auto& data = j.at("data");
  if (data.contains("synthetic")) {
    const auto& s = data.at("synthetic");
    SyntheticSpec spec;
    spec.n_sources = s.value("n_sources", spec.n_sources);
    spec.samples_per_source = s.value("samples_per_source", spec.samples_per_source);
    spec.reference_size = s.value("reference_size", spec.reference_size);
    spec.test_size = s.value("test_size", spec.test_size);
    spec.n_features = s.value("n_features", spec.n_features);
    spec.class_separation = s.value("class_separation", spec.class_separation);
    spec.positive_fraction = s.value("positive_fraction", spec.positive_fraction);
    c.data = spec;
  } else if (data.contains("csv_paths")) {
    const auto& p = data.at("csv_paths");
    CsvDataSpec spec;
    spec.sources = p.at("sources").get<std::vector<std::string>>();
    spec.reference = p.at("reference").get<std::string>();
    spec.test = p.at("test").get<std::string>();
    spec.label_column = p.value("label_column", spec.label_column);
    const auto enc = p.value("label_encoding", std::string("signed"));
    if (enc == "zero_one") spec.encoding = LabelEncoding::zero_one;
    else if (enc != "signed") throw std::invalid_argument("label_encoding must be 'signed' or 'zero_one'");
    c.data = spec;
  } else {
    throw std::invalid_argument("data must contain 'synthetic' or 'csv_paths'");
  }

  if (j.contains("corruption") && !j.at("corruption").is_null()) {
    const auto& cj = j.at("corruption");
    CorruptionSettings s;
    s.kind = corruption_kind_from_string(cj.at("kind").get<std::string>());
    const auto& n = cj.at("n_corrupted");
    s.n_corrupted = n.is_array() ? n.get<std::vector<std::size_t>>() : std::vector<std::size_t>{n.get<std::size_t>()};
    s.proportion = cj.value("proportion", 1.0);
    c.corruption = s;
  }

  if (j.contains("methods")) {
    c.methods.clear();
    for (const auto& m : j.at("methods")) c.methods.push_back(method_from_string(m.get<std::string>()));
  } else if (j.contains("method")) {
    c.methods = {method_from_string(j.at("method").get<std::string>())};
  }
  if (j.contains("lambda_grid")) c.lambda_grid = j.at("lambda_grid").get<std::vector<double>>();
  if (j.contains("ridge_grid")) c.ridge_grid = j.at("ridge_grid").get<std::vector<double>>();
  c.cv_folds = j.value("cv_folds", c.cv_folds);
  c.repeats = j.value("repeats", c.repeats);
  c.seed = j.value("seed", c.seed);
  c.threads = j.value("threads", c.threads);
  if (j.contains("train")) {
    const auto& t = j.at("train");
    c.train.max_iterations = t.value("max_iterations", c.train.max_iterations);
    c.train.tolerance = t.value("tolerance", c.train.tolerance);
  }
  c.validate();
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  auto config = nlohmann::json::parse(in).get<ExperimentConfig>();
  // CSV paths are relative to the config file.
  if (auto* csv = std::get_if<CsvDataSpec>(&config.data)) {
    const auto base = std::filesystem::path(path).parent_path();
    auto resolve = [&](std::string& p) {
      if (std::filesystem::path(p).is_relative()) p = (base / p).string();
    };
    for (auto& s : csv->sources) resolve(s);
    resolve(csv->reference);
    resolve(csv->test);
  }
  return config;
}

// ---------------------------------------------------------------------------
// Data

namespace {

Dataset draw_gaussian_classes(const SyntheticSpec& spec, std::size_t n, Rng& rng, std::string id) {
  const auto d = static_cast<Eigen::Index>(spec.n_features);
  const double offset = 0.5 * spec.class_separation / std::sqrt(static_cast<double>(spec.n_features));
  std::bernoulli_distribution positive(spec.positive_fraction);
  std::normal_distribution<double> noise(0.0, 1.0);
  Matrix x(static_cast<Eigen::Index>(n), d);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = positive(rng) ? 1 : -1;
    for (Eigen::Index c = 0; c < d; ++c) x(static_cast<Eigen::Index>(i), c) = y[i] * offset + noise(rng);
  }
  return Dataset(std::move(x), std::move(y), std::move(id));
}

}  // namespace

Scenario generate_synthetic_pool(const SyntheticSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::vector<Dataset> sources;
  for (std::size_t i = 0; i < spec.n_sources; ++i) {
    Rng rng(derive_seed(seed, i));
    sources.push_back(draw_gaussian_classes(spec, spec.samples_per_source, rng, "source_" + std::to_string(i)));
  }
  Rng reference_rng(derive_seed(seed, 1'000'001));
  Rng test_rng(derive_seed(seed, 1'000'002));
  auto reference = draw_gaussian_classes(spec, spec.reference_size, reference_rng, "reference");
  auto test = draw_gaussian_classes(spec, spec.test_size, test_rng, "test");
  return {SourcePool(std::move(sources), std::move(reference)), std::move(test), {}};
}

std::uint64_t repeat_seed(std::uint64_t master_seed, std::size_t repeat) {
  return derive_seed(master_seed, repeat);
}

Scenario build_scenario(const ExperimentConfig& config, std::uint64_t seed, std::size_t n_corrupted) {
  Scenario scenario = [&] {
    if (const auto* s = std::get_if<SyntheticSpec>(&config.data)) {
      return generate_synthetic_pool(*s, derive_seed(seed, kDataStream));
    }
    const auto& csv = std::get<CsvDataSpec>(config.data);
    std::vector<Dataset> sources;
    for (const auto& p : csv.sources) sources.push_back(load_csv(p, csv.label_column, csv.encoding));
    auto reference = load_csv(csv.reference, csv.label_column, csv.encoding);
    auto test = load_csv(csv.test, csv.label_column, csv.encoding);
    return Scenario{SourcePool(std::move(sources), std::move(reference)), std::move(test), {}};
  }();

  if (config.corruption && n_corrupted > 0) {
    const CorruptionSpec spec{config.corruption->kind, config.corruption->proportion,
                              derive_seed(seed, kCorruptionSpecStream)};
    auto corrupted = corrupt_pool(scenario.pool, n_corrupted, spec, derive_seed(seed, kCorruptionChoiceStream));
    return {std::move(corrupted.pool), std::move(scenario.test), std::move(corrupted.corrupted_sources)};
  }
  return scenario;
}

// ---------------------------------------------------------------------------
// Methods

std::size_t FittedModel::count_errors(const Dataset& data) const {
  const Dataset input = input_stats ? apply_normalization(data, *input_stats) : data;
  if (median_vote) {
    std::size_t errors = 0;
    for (std::size_t i = 0; i < input.size(); ++i)
      if (median_of_probabilities(std::span<const LinearPredictor>(models), input.row(i)) != input.label(i)) ++errors;
    return errors;
  }
  return msrobust::count_errors(models.at(0), input);
}

double FittedModel::error(const Dataset& data) const {
  if (data.empty()) throw std::invalid_argument("error on an empty dataset");
  return static_cast<double>(count_errors(data)) / static_cast<double>(data.size());
}

RunResult run_ours(const SourcePool& pool, const Dataset& test, const ExperimentConfig& config, std::uint64_t seed,
                   FittedModel* model) {
  const auto start = std::chrono::steady_clock::now();
  const auto lambdas = sorted_grid(config.lambda_grid);
  const auto ridges = sorted_grid(config.ridge_grid);

  std::size_t best_l = 0, best_r = 0;
  if (lambdas.size() * ridges.size() > 1) {
    std::vector<std::size_t> errors(lambdas.size() * ridges.size(), 0);
    for (const auto& fold : make_folds(pool.reference(), config.cv_folds, derive_seed(seed, kCvStream))) {
      // The training folds play the reference: discrepancies are recomputed against them.
      const auto prepared = prepare_ours(pool.with_reference(fold.train_reference));
      for (std::size_t li = 0; li < lambdas.size(); ++li) {
        const auto alpha = ours_weights(prepared, lambdas[li]);
        for (std::size_t ri = 0; ri < ridges.size(); ++ri) {
          const auto h = train_weighted_erm(prepared.extended, alpha, Loss::logistic, with_ridge(config.train, ridges[ri]));
          errors[li * ridges.size() + ri] += count_errors(h, fold.validation);
        }
      }
    }
    // Strict improvement only: ties keep the smaller lambda, then the smaller ridge.
    std::size_t best = 0;
    for (std::size_t k = 1; k < errors.size(); ++k)
      if (errors[k] < errors[best]) best = k;
    best_l = best / ridges.size();
    best_r = best % ridges.size();
  }

  const auto prepared = prepare_ours(pool);
  auto alpha = ours_weights(prepared, lambdas[best_l]);
  const auto h = train_weighted_erm(prepared.extended, alpha, Loss::logistic, with_ridge(config.train, ridges[best_r]));

  RunResult r;
  r.method = Method::ours;
  r.seed = seed;
  r.test_error = zero_one_error(h, test);
  r.selected_lambda = lambdas[best_l];
  r.selected_ridge = ridges[best_r];
  r.alpha = std::move(alpha);
  r.discrepancies = prepared.discrepancies;
  if (model) *model = FittedModel{{h}, false, std::nullopt};
  r.wall_time = seconds_since(start);
  return r;
}

RunResult run_baseline(const SourcePool& pool, const Dataset& test, const ExperimentConfig& config, Method method,
                       std::uint64_t seed, FittedModel* model) {
  if (method == Method::ours) throw std::invalid_argument("run_baseline: use run_ours for 'ours'");
  const auto start = std::chrono::steady_clock::now();
  const auto ridges = sorted_grid(config.ridge_grid);

  // Local source models depend only on the ridge, not on the fold.
  std::vector<std::vector<LinearPredictor>> local(ridges.size());
  auto local_for = [&](std::size_t ri) -> const std::vector<LinearPredictor>* {
    if (!uses_local_models(method)) return nullptr;
    if (local[ri].empty()) local[ri] = source_local_models(pool, with_ridge(config.train, ridges[ri]));
    return &local[ri];
  };

  std::size_t best_r = 0;
  if (ridges.size() > 1) {
    std::vector<std::size_t> errors(ridges.size(), 0);
    for (const auto& fold : make_folds(pool.reference(), config.cv_folds, derive_seed(seed, kCvStream))) {
      const auto fold_pool = pool.with_reference(fold.train_reference);
      for (std::size_t ri = 0; ri < ridges.size(); ++ri) {
        const auto fitted = fit_baseline(method, fold_pool, with_ridge(config.train, ridges[ri]), local_for(ri));
        errors[ri] += fitted.count_errors(fold.validation);
      }
    }
    for (std::size_t k = 1; k < errors.size(); ++k)
      if (errors[k] < errors[best_r]) best_r = k;
  }

  const auto fitted = fit_baseline(method, pool, with_ridge(config.train, ridges[best_r]), local_for(best_r));
  RunResult r;
  r.method = method;
  r.seed = seed;
  r.test_error = fitted.error(test);
  r.selected_ridge = ridges[best_r];
  if (model) *model = fitted;
  r.wall_time = seconds_since(start);
  return r;
}

RunResult run_method(const SourcePool& pool, const Dataset& test, const ExperimentConfig& config, Method method,
                     std::uint64_t seed, FittedModel* model) {
  return method == Method::ours ? run_ours(pool, test, config, seed, model)
                                : run_baseline(pool, test, config, method, seed, model);
}

// ---------------------------------------------------------------------------
// Sweep

std::vector<CellSummary> summarize(const std::vector<RunResult>& runs, const std::vector<Method>& methods,
                                   const std::vector<std::size_t>& grid) {
  std::vector<CellSummary> out;
  for (auto m : methods) {
    for (auto n : grid) {
      std::vector<double> errs;
      for (const auto& r : runs)
        if (r.method == m && r.n_corrupted == n) errs.push_back(r.test_error);
      if (errs.empty()) continue;
      double mean = 0.0;
      for (double e : errs) mean += e;
      mean /= static_cast<double>(errs.size());
      double var = 0.0;
      for (double e : errs) var += (e - mean) * (e - mean);
      const double sd = errs.size() > 1 ? std::sqrt(var / static_cast<double>(errs.size() - 1)) : 0.0;
      out.push_back({m, n, mean, sd, errs.size()});
    }
  }
  return out;
}

SweepResult run_sweep(const ExperimentConfig& config) {
  config.validate();
  const auto grid = config.corruption_grid();
  const std::size_t n_cells = grid.size() * config.repeats;
  const std::size_t n_methods = config.methods.size();

  std::vector<RunResult> cells(n_cells * n_methods);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t cell; (cell = next.fetch_add(1)) < n_cells;) {
      try {
        const std::size_t gi = cell / config.repeats, repeat = cell % config.repeats;
        const auto seed = repeat_seed(config.seed, repeat);
        const auto scenario = build_scenario(config, seed, grid[gi]);
        for (std::size_t mi = 0; mi < n_methods; ++mi) {
          auto r = run_method(scenario.pool, scenario.test, config, config.methods[mi], seed);
          r.n_corrupted = grid[gi];
          r.repeat = repeat;
          cells[mi * n_cells + cell] = std::move(r);
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n_cells;
      }
    }
  };

  unsigned threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_cells));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  SweepResult result;
  result.runs = std::move(cells);
  result.summary = summarize(result.runs, config.methods, grid);
  return result;
}

void write_results_csv(const SweepResult& result, std::ostream& out) {
  out << "method,n_corrupted,repeat,seed,test_error,selected_lambda,selected_ridge\n";
  for (const auto& r : result.runs) {
    out << to_string(r.method) << ',' << r.n_corrupted << ',' << r.repeat << ',' << r.seed << ',' << g17(r.test_error)
        << ',' << g17(r.selected_lambda) << ',' << g17(r.selected_ridge) << '\n';
  }
}

void write_results_sidecar(const SweepResult& result, std::ostream& out) {
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : result.runs) {
    nlohmann::json j{{"method", to_string(r.method)},
                     {"n_corrupted", r.n_corrupted},
                     {"repeat", r.repeat},
                     {"seed", r.seed},
                     {"discrepancies", r.discrepancies}};
    j["alpha"] = r.alpha ? nlohmann::json(r.alpha->values()) : nlohmann::json(nullptr);
    runs.push_back(std::move(j));
  }
  out << nlohmann::json{{"runs", runs}}.dump(2) << '\n';
}

void write_summary_csv(const SweepResult& result, std::ostream& out) {
  out << "method,n_corrupted,mean_test_error,std_test_error,count\n";
  for (const auto& c : result.summary) {
    out << to_string(c.method) << ',' << c.n_corrupted << ',' << g17(c.mean_test_error) << ','
        << g17(c.std_test_error) << ',' << c.count << '\n';
  }
}

}  // namespace msrobust
