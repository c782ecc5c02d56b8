#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "msrobust/baselines.hpp"
#include "msrobust/corruption.hpp"
#include "msrobust/data.hpp"
#include "msrobust/discrepancy.hpp"
#include "msrobust/experiment.hpp"
#include "msrobust/federated.hpp"
#include "msrobust/linear.hpp"
#include "msrobust/weights.hpp"

namespace py = pybind11;
using namespace msrobust;
using namespace pybind11::literals;

namespace {

std::vector<Vector> rows_of(const Matrix& points) {
  std::vector<Vector> out;
  for (Eigen::Index r = 0; r < points.rows(); ++r) out.emplace_back(points.row(r).transpose());
  return out;
}

py::dict trace_dict(const ProtocolTrace& t) {
  py::list messages;
  for (const auto& m : t.messages)
    messages.append(py::dict("from"_a = m.from, "to"_a = m.to, "kind"_a = to_string(m.kind),
                             "payload_size"_a = m.payload_size, "round"_a = m.round));
  std::vector<double> values;
  for (const auto& e : t.result) values.push_back(e.value);
  return py::dict("case"_a = t.protocol_case, "messages"_a = messages, "total_bytes"_a = t.total_bytes,
                  "rounds"_a = t.rounds, "discrepancies"_a = values);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Robust learning from multiple untrusted sources";

  py::register_exception<InvalidData>(m, "InvalidData", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init<Matrix, std::vector<int>, std::string>(), "features"_a, "labels"_a, "source_id"_a = "")
      .def_property_readonly("features", &Dataset::features)
      .def_property_readonly("labels", &Dataset::labels)
      .def_property_readonly("source_id", &Dataset::source_id)
      .def_property_readonly("n_features", &Dataset::n_features)
      .def("__len__", &Dataset::size)
      .def("__repr__", [](const Dataset& d) {
        return "<Dataset '" + d.source_id() + "' " + std::to_string(d.size()) + "x" + std::to_string(d.n_features()) + ">";
      });

  m.def("load_csv", [](const std::string& path, const std::string& label_column, bool zero_one) {
    return load_csv(path, label_column, zero_one ? LabelEncoding::zero_one : LabelEncoding::signed_labels);
  }, "path"_a, "label_column"_a = "label", "zero_one"_a = false);
  m.def("save_csv", [](const Dataset& d, const std::string& path, const std::string& label_column, bool zero_one) {
    save_csv(d, path, label_column, zero_one ? LabelEncoding::zero_one : LabelEncoding::signed_labels);
  }, "data"_a, "path"_a, "label_column"_a = "label", "zero_one"_a = false);

  py::class_<SourcePool>(m, "SourcePool")
      .def(py::init<std::vector<Dataset>, Dataset>(), "sources"_a, "reference"_a)
      .def_property_readonly("sources", &SourcePool::sources)
      .def_property_readonly("reference", &SourcePool::reference)
      .def("sample_counts", &SourcePool::sample_counts)
      .def("__len__", &SourcePool::n_sources);

  py::class_<LinearPredictor>(m, "LinearPredictor")
      .def(py::init<Vector, double>(), "weights"_a, "bias"_a = 0.0)
      .def_readwrite("weights", &LinearPredictor::weights)
      .def_readwrite("bias", &LinearPredictor::bias)
      .def("predict", [](const LinearPredictor& h, const Matrix& x) {
        std::vector<int> out;
        for (Eigen::Index r = 0; r < x.rows(); ++r) out.push_back(h.predict_label(x.row(r)));
        return out;
      }, "features"_a)
      .def("error", [](const LinearPredictor& h, const Dataset& d) { return zero_one_error(h, d); }, "data"_a);

  // Discrepancy
  py::class_<DiscrepancyEstimate>(m, "DiscrepancyEstimate")
      .def_readonly("value", &DiscrepancyEstimate::value)
      .def_readonly("solver_risk", &DiscrepancyEstimate::solver_risk)
      .def_readonly("source_id", &DiscrepancyEstimate::source_id);
  m.def("empirical_discrepancy", [](const Dataset& s, const Dataset& r) { return empirical_discrepancy(s, r); },
        "source"_a, "reference"_a);
  m.def("exact_discrepancy_oracle", [](const Dataset& s, const Dataset& r, const std::string& family) {
    if (family != "thresholds_1d" && family != "lines_2d") throw std::invalid_argument("family must be thresholds_1d or lines_2d");
    return exact_discrepancy_oracle(s, r, family == "lines_2d" ? HypothesisFamily::lines_2d : HypothesisFamily::thresholds_1d);
  }, "source"_a, "reference"_a, "family"_a);

  // Weights
  m.def("solve_weights", [](std::vector<double> d, std::vector<std::size_t> counts, double lambda) {
    return solve_weights({std::move(d), std::move(counts), lambda}).values();
  }, "discrepancies"_a, "sample_counts"_a, "lam"_a);
  m.def("weight_objective", [](std::vector<double> d, std::vector<std::size_t> counts, double lambda,
                               const std::vector<double>& alpha) {
    return weight_objective({std::move(d), std::move(counts), lambda}, alpha);
  }, "discrepancies"_a, "sample_counts"_a, "lam"_a, "alpha"_a);
  m.def("project_simplex", [](const std::vector<double>& v) { return project_simplex(v).values(); }, "v"_a);
  m.def("excess_risk_bound", [](const std::vector<double>& alpha, std::vector<double> d, std::vector<std::size_t> counts,
                                std::vector<double> rademacher, double loss_bound, double delta) {
    return excess_risk_bound({SimplexWeights(alpha), std::move(d), std::move(counts), std::move(rademacher), loss_bound, delta});
  }, "alpha"_a, "discrepancies"_a, "sample_counts"_a, "rademacher_bounds"_a, "loss_bound"_a = 1.0, "delta"_a = 0.05);
  m.def("linear_rademacher_bound", &linear_rademacher_bound, "weight_norm_bound"_a, "data_norm_bound"_a, "m"_a);

  // Training
  m.def("train_weighted_erm", [](const SourcePool& pool, const std::vector<double>& alpha, const std::string& loss,
                                 double ridge, int max_iterations, double tolerance) {
    TrainConfig c;
    c.ridge_strength = ridge;
    c.max_iterations = max_iterations;
    c.tolerance = tolerance;
    return train_weighted_erm(pool, SimplexWeights(alpha), loss_from_string(loss), c);
  }, "pool"_a, "alpha"_a, "loss"_a = "logistic", "ridge"_a = 1e-3, "max_iterations"_a = 50000, "tolerance"_a = 1e-10);

  // Baselines
  m.def("geometric_median", [](const Matrix& points, double tol) { return geometric_median(rows_of(points), tol); },
        "points"_a, "tolerance"_a = 1e-10);
  m.def("componentwise_median", [](const Matrix& points) { return componentwise_median(rows_of(points)); }, "points"_a);
  m.def("huber_of_logistic", &huber_of_logistic, "logistic_value"_a, "c"_a = kHuberThreshold);

  // Corruption
  m.def("corrupt", [](const Dataset& d, const std::string& kind, double proportion, std::uint64_t seed) {
    return corrupt(d, {corruption_kind_from_string(kind), proportion, seed});
  }, "data"_a, "kind"_a, "proportion"_a = 1.0, "seed"_a = 0);
  m.def("corrupt_pool", [](const SourcePool& pool, std::size_t n, const std::string& kind, double proportion,
                           std::uint64_t spec_seed, std::uint64_t seed) {
    auto r = corrupt_pool(pool, n, {corruption_kind_from_string(kind), proportion, spec_seed}, seed);
    return py::make_tuple(r.pool, r.corrupted_sources);
  }, "pool"_a, "n_corrupted"_a, "kind"_a, "proportion"_a = 1.0, "spec_seed"_a = 0, "seed"_a = 0);

  // Federated simulation
  m.def("run_case1", [](const SourcePool& pool) { return trace_dict(run_case1(pool)); }, "pool"_a);
  m.def("run_case2", [](const SourcePool& pool, int rounds, std::size_t batch_size, double step, std::uint64_t seed) {
    Case2Options o;
    o.rounds = rounds;
    o.batch_size = batch_size;
    o.step_size = step;
    o.seed = seed;
    return trace_dict(run_case2(pool, o));
  }, "pool"_a, "rounds"_a = 1000, "batch_size"_a = 32, "step_size"_a = 0.1, "seed"_a = 0);

  // Experiments, configured with the same JSON the CLI reads.
  m.def("run_experiment", [](const std::string& config_json) {
    const auto config = nlohmann::json::parse(config_json).get<ExperimentConfig>();
    SweepResult r;
    {
      py::gil_scoped_release release;
      r = run_sweep(config);
    }
    std::ostringstream csv, summary;
    write_results_csv(r, csv);
    write_summary_csv(r, summary);
    py::list runs;
    for (const auto& run : r.runs) {
      py::dict d("method"_a = to_string(run.method), "n_corrupted"_a = run.n_corrupted, "repeat"_a = run.repeat,
                 "seed"_a = run.seed, "test_error"_a = run.test_error, "selected_lambda"_a = run.selected_lambda,
                 "selected_ridge"_a = run.selected_ridge, "discrepancies"_a = run.discrepancies);
      d["alpha"] = run.alpha ? py::cast(run.alpha->values()) : py::none();
      runs.append(d);
    }
    return py::dict("runs"_a = runs, "results_csv"_a = csv.str(), "summary_csv"_a = summary.str());
  }, "config_json"_a);
}
