#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "msrobust/corruption.hpp"
#include "msrobust/data.hpp"
#include "msrobust/discrepancy.hpp"
#include "msrobust/experiment.hpp"
#include "msrobust/federated.hpp"
#include "msrobust/weights.hpp"

namespace fs = std::filesystem;
using namespace msrobust;
using nlohmann::json;

namespace {

struct CsvOptions {
  std::string label_column = "label";
  bool zero_one = false;

  LabelEncoding encoding() const { return zero_one ? LabelEncoding::zero_one : LabelEncoding::signed_labels; }
};

void add_csv_options(CLI::App* cmd, CsvOptions& o) {
  cmd->add_option("--label-column", o.label_column, "Name of the label column")->capture_default_str();
  cmd->add_flag("--zero-one", o.zero_one, "Labels are 0/1 instead of -1/+1");
}

// A directory contributes every *.csv inside it, in name order.
std::vector<Dataset> load_sources(const fs::path& path, const CsvOptions& o) {
  std::vector<fs::path> files;
  if (fs::is_directory(path)) {
    for (const auto& e : fs::directory_iterator(path))
      if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw std::runtime_error("no .csv files in " + path.string());
  } else {
    files.push_back(path);
  }
  std::vector<Dataset> out;
  for (const auto& f : files) out.push_back(load_csv(f, o.label_column, o.encoding()));
  return out;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

json estimates_json(const std::vector<DiscrepancyEstimate>& est, const std::vector<std::size_t>& counts) {
  json items = json::array();
  for (const auto& e : est)
    items.push_back({{"source_id", e.source_id}, {"value", e.value}, {"solver_risk", e.solver_risk}});
  return {{"discrepancies", items}, {"sample_counts", counts}};
}

// Accepts the output of `discrepancy` or a bare {"discrepancies": [..], "sample_counts": [..]}.
WeightProblem read_weight_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  const auto j = json::parse(in);
  WeightProblem p;
  for (const auto& d : j.at("discrepancies")) p.discrepancies.push_back(d.is_object() ? d.at("value").get<double>() : d.get<double>());
  p.sample_counts = j.at("sample_counts").get<std::vector<std::size_t>>();
  return p;
}

json run_json(const RunResult& r) {
  json j{{"method", to_string(r.method)},
         {"n_corrupted", r.n_corrupted},
         {"seed", r.seed},
         {"test_error", r.test_error},
         {"discrepancies", r.discrepancies}};
  j["selected_lambda"] = std::isnan(r.selected_lambda) ? json(nullptr) : json(r.selected_lambda);
  j["selected_ridge"] = std::isnan(r.selected_ridge) ? json(nullptr) : json(r.selected_ridge);
  j["alpha"] = r.alpha ? json(r.alpha->values()) : json(nullptr);
  return j;
}

fs::path sibling(const fs::path& out, const std::string& suffix, const std::string& ext) {
  return out.parent_path() / (out.stem().string() + suffix + ext);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust learning from multiple untrusted sources"};
  app.require_subcommand(1);

  // discrepancy
  CsvOptions disc_csv;
  std::string disc_pool, disc_reference, disc_out;
  auto* disc = app.add_subcommand("discrepancy", "Estimate each source's discrepancy to the reference");
  disc->add_option("pool", disc_pool, "Source CSV file or directory of CSV files")->required();
  disc->add_option("reference", disc_reference, "Reference CSV file")->required();
  disc->add_option("-o,--out", disc_out, "Output JSON (default stdout)");
  add_csv_options(disc, disc_csv);

  // weights
  std::string weights_in, weights_out;
  double weights_lambda = 0.0;
  auto* weights = app.add_subcommand("weights", "Solve for source weights from a discrepancy file");
  weights->add_option("discrepancies", weights_in, "JSON with discrepancies and sample_counts")->required();
  weights->add_option("--lambda", weights_lambda, "Trade-off lambda >= 0")->required();
  weights->add_option("-o,--out", weights_out, "Output JSON (default stdout)");

  // train
  std::string train_method, train_config, train_model_out;
  std::optional<std::size_t> train_n;
  std::size_t train_repeat = 0;
  auto* train = app.add_subcommand("train", "Run one method on one scenario of a config");
  train->add_option("--method", train_method, "Method name")->required();
  train->add_option("--config", train_config, "Experiment config JSON")->required();
  train->add_option("--n-corrupted", train_n, "Corrupted source count (default: first in config)");
  train->add_option("--repeat", train_repeat, "Repeat index used to derive the seed")->capture_default_str();
  train->add_option("--model-out", train_model_out, "Write the fitted predictor(s) as JSON");

  // corrupt
  CsvOptions corrupt_csv;
  std::string corrupt_spec_path, corrupt_input, corrupt_output, corrupt_kind;
  double corrupt_p = 1.0;
  std::uint64_t corrupt_seed = 0;
  auto* corrupt_cmd = app.add_subcommand("corrupt", "Apply a corruption to one dataset");
  corrupt_cmd->add_option("input", corrupt_input, "Input CSV")->required();
  corrupt_cmd->add_option("output", corrupt_output, "Output CSV")->required();
  auto* spec_opt = corrupt_cmd->add_option("--spec", corrupt_spec_path, "CorruptionSpec JSON file");
  corrupt_cmd->add_option("--kind", corrupt_kind, "label_bias | shuffled_labels | shuffled_features")->excludes(spec_opt);
  corrupt_cmd->add_option("--proportion", corrupt_p, "Fraction of samples touched")->excludes(spec_opt);
  corrupt_cmd->add_option("--seed", corrupt_seed, "Seed")->excludes(spec_opt);
  add_csv_options(corrupt_cmd, corrupt_csv);

  // experiment
  std::string exp_config, exp_out;
  std::optional<unsigned> exp_threads;
  auto* experiment = app.add_subcommand("experiment", "Run a full sweep and write result files");
  experiment->add_option("--config", exp_config, "Experiment config JSON")->required();
  experiment->add_option("--out", exp_out, "Results CSV; the .json sidecar and _summary.csv go next to it")->required();
  experiment->add_option("--threads", exp_threads, "Worker threads (0 = all cores)");

  // simulate-federated
  CsvOptions fed_csv;
  int fed_case = 1;
  std::string fed_pool, fed_reference, fed_config, fed_trace, fed_out;
  Case2Options fed_opt;
  auto* fed = app.add_subcommand("simulate-federated", "Simulate the decentralized discrepancy protocols");
  fed->add_option("--case", fed_case, "Protocol case")->required()->check(CLI::IsMember({1, 2}));
  auto* fed_pool_opt = fed->add_option("--pool", fed_pool, "Source CSV file or directory");
  auto* fed_ref_opt = fed->add_option("--reference", fed_reference, "Reference CSV");
  auto* fed_cfg_opt = fed->add_option("--config", fed_config, "Take the pool from an experiment config instead");
  fed_pool_opt->needs(fed_ref_opt)->excludes(fed_cfg_opt);
  fed->add_option("--rounds", fed_opt.rounds, "Case 2 rounds")->capture_default_str();
  fed->add_option("--batch-size", fed_opt.batch_size, "Case 2 minibatch size")->capture_default_str();
  fed->add_option("--step", fed_opt.step_size, "Case 2 step size")->capture_default_str();
  fed->add_option("--seed", fed_opt.seed, "Case 2 minibatch seed")->capture_default_str();
  fed->add_option("--trace", fed_trace, "Write the message log as JSON lines");
  fed->add_option("-o,--out", fed_out, "Output JSON (default stdout)");
  add_csv_options(fed, fed_csv);

  // generate
  std::string gen_config, gen_dir;
  std::optional<std::size_t> gen_n;
  auto* generate = app.add_subcommand("generate", "Write the synthetic scenario of a config as CSV files");
  generate->add_option("--config", gen_config, "Experiment config JSON with synthetic data")->required();
  generate->add_option("--out-dir", gen_dir, "Directory to create")->required();
  generate->add_option("--n-corrupted", gen_n, "Corrupted source count (default: first in config)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*disc) {
      const auto sources = load_sources(disc_pool, disc_csv);
      const auto reference = load_csv(disc_reference, disc_csv.label_column, disc_csv.encoding());
      std::vector<DiscrepancyEstimate> est;
      std::vector<std::size_t> counts;
      for (const auto& s : sources) {
        est.push_back(empirical_discrepancy(s, reference));
        counts.push_back(s.size());
      }
      write_output(disc_out, estimates_json(est, counts).dump(2) + "\n");
    } else if (*weights) {
      auto p = read_weight_problem(weights_in);
      p.lambda = weights_lambda;
      const auto alpha = solve_weights(p);
      const json j{{"lambda", p.lambda}, {"alpha", alpha.values()}, {"objective", weight_objective(p, alpha.values())}};
      write_output(weights_out, j.dump(2) + "\n");
    } else if (*train) {
      const auto config = load_experiment_config(train_config);
      const auto method = method_from_string(train_method);
      const std::size_t n = train_n.value_or(config.corruption_grid().front());
      const auto seed = repeat_seed(config.seed, train_repeat);
      const auto scenario = build_scenario(config, seed, n);
      FittedModel model;
      auto r = run_method(scenario.pool, scenario.test, config, method, seed, &model);
      r.n_corrupted = n;
      r.repeat = train_repeat;
      auto j = run_json(r);
      j["corrupted_sources"] = scenario.corrupted_sources;
      std::cout << j.dump(2) << "\n";
      if (!train_model_out.empty()) {
        json m{{"median_vote", model.median_vote}, {"models", model.models}};
        if (model.input_stats)
          m["input_stats"] = {{"mean", std::vector<double>(model.input_stats->mean.begin(), model.input_stats->mean.end())},
                              {"std", std::vector<double>(model.input_stats->std.begin(), model.input_stats->std.end())}};
        write_output(train_model_out, m.dump(2) + "\n");
      }
    } else if (*corrupt_cmd) {
      CorruptionSpec spec;
      if (!corrupt_spec_path.empty()) {
        std::ifstream in(corrupt_spec_path);
        if (!in) throw std::runtime_error("cannot open " + corrupt_spec_path);
        spec = json::parse(in).get<CorruptionSpec>();
      } else {
        if (corrupt_kind.empty()) throw std::invalid_argument("give --spec or --kind");
        spec = {corruption_kind_from_string(corrupt_kind), corrupt_p, corrupt_seed};
      }
      const auto data = load_csv(corrupt_input, corrupt_csv.label_column, corrupt_csv.encoding());
      const auto touched = corrupted_samples(data.size(), spec);
      save_csv(corrupt(data, spec), corrupt_output, corrupt_csv.label_column, corrupt_csv.encoding());
      std::cerr << "corrupted " << touched.size() << " of " << data.size() << " samples\n";
    } else if (*experiment) {
      auto config = load_experiment_config(exp_config);
      if (exp_threads) config.threads = *exp_threads;
      const auto result = run_sweep(config);
      const fs::path out(exp_out);
      if (out.has_parent_path()) fs::create_directories(out.parent_path());
      {
        std::ofstream f(out);
        write_results_csv(result, f);
      }
      {
        std::ofstream f(sibling(out, "", ".json"));
        write_results_sidecar(result, f);
      }
      {
        std::ofstream f(sibling(out, "_summary", ".csv"));
        write_summary_csv(result, f);
      }
      write_summary_csv(result, std::cout);
    } else if (*fed) {
      SourcePool pool = [&] {
        if (!fed_config.empty()) {
          const auto config = load_experiment_config(fed_config);
          const auto seed = repeat_seed(config.seed, 0);
          return build_scenario(config, seed, config.corruption_grid().front()).pool;
        }
        if (fed_pool.empty()) throw std::invalid_argument("give --pool and --reference, or --config");
        return SourcePool(load_sources(fed_pool, fed_csv), load_csv(fed_reference, fed_csv.label_column, fed_csv.encoding()));
      }();
      const auto trace = fed_case == 1 ? run_case1(pool) : run_case2(pool, fed_opt);
      if (!fed_trace.empty()) {
        std::ofstream f(fed_trace);
        write_trace_jsonl(trace, f);
      }
      auto j = estimates_json(trace.result, pool.sample_counts());
      j["case"] = trace.protocol_case;
      j["messages"] = trace.messages.size();
      j["total_bytes"] = trace.total_bytes;
      j["rounds"] = trace.rounds;
      write_output(fed_out, j.dump(2) + "\n");
    } else if (*generate) {
      const auto config = load_experiment_config(gen_config);
      if (!std::holds_alternative<SyntheticSpec>(config.data))
        throw std::invalid_argument("generate needs a synthetic config");
      const std::size_t n = gen_n.value_or(config.corruption_grid().front());
      const auto scenario = build_scenario(config, repeat_seed(config.seed, 0), n);
      const fs::path dir(gen_dir);
      fs::create_directories(dir / "sources");
      for (std::size_t i = 0; i < scenario.pool.n_sources(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "source_%03zu.csv", i);
        save_csv(scenario.pool.source(i), dir / "sources" / name);
      }
      save_csv(scenario.pool.reference(), dir / "reference.csv");
      save_csv(scenario.test, dir / "test.csv");
      std::cout << json{{"corrupted_sources", scenario.corrupted_sources}}.dump() << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
