#include "msrobust/federated.hpp"

#include <algorithm>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "msrobust/rng.hpp"

namespace msrobust {

std::string to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::reference_broadcast: return "reference_broadcast";
    case MessageKind::discrepancy_result: return "discrepancy_result";
    case MessageKind::model_query: return "model_query";
    case MessageKind::gradient_reply: return "gradient_reply";
  }
  return "?";
}

namespace {

class TraceBuilder {
 public:
  explicit TraceBuilder(int protocol_case) { trace_.protocol_case = protocol_case; }

  void send(NodeId from, NodeId to, MessageKind kind, int round, std::vector<double> payload) {
    Message m{from, to, kind, payload.size() * kBytesPerReal, round, std::move(payload)};
    trace_.total_bytes += m.payload_size;
    trace_.rounds = std::max(trace_.rounds, round + 1);
    trace_.messages.push_back(std::move(m));
  }

  ProtocolTrace finish(std::vector<DiscrepancyEstimate> result, std::vector<bool> attested) {
    trace_.result = std::move(result);
    trace_.attested = std::move(attested);
    return std::move(trace_);
  }

 private:
  ProtocolTrace trace_;
};

std::vector<double> flatten(const Dataset& data) {
  std::vector<double> out;
  out.reserve(data.size() * (data.n_features() + 1));
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto row = data.row(i);
    out.insert(out.end(), row.data(), row.data() + row.size());
    out.push_back(static_cast<double>(data.label(i)));
  }
  return out;
}

std::vector<double> to_payload(const Vector& v) { return {v.data(), v.data() + v.size()}; }

// Gradient of 1/2 * mean_j (w.x_j + b - t_j)^2 over the given rows.
Vector squared_term_gradient(const Dataset& data, std::span<const std::size_t> rows, bool flip, const Vector& params) {
  const auto d = static_cast<Eigen::Index>(data.n_features());
  Vector g = Vector::Zero(d + 1);
  for (auto j : rows) {
    const auto x = data.row(j);
    const double target = flip ? -data.label(j) : data.label(j);
    const double r = x.dot(params.head(d)) + params[d] - target;
    g.head(d) += r * x.transpose();
    g[d] += r;
  }
  return g / static_cast<double>(rows.size());
}

double discrepancy_from_risks(double source_risk, const Dataset& reference, const LinearPredictor& h) {
  const double reference_risk =
      static_cast<double>(count_errors(h, reference)) / static_cast<double>(reference.size());
  return std::clamp(1.0 - (source_risk + reference_risk), 0.0, 1.0);
}

}  // namespace

ProtocolTrace run_case1(const SourcePool& pool, const TrainConfig& relax_config, bool attested_nodes) {
  TraceBuilder trace(1);
  const auto broadcast = flatten(pool.reference());
  for (std::size_t i = 0; i < pool.n_sources(); ++i)
    trace.send(kLearnerNode, source_node(i), MessageKind::reference_broadcast, 0, broadcast);

  std::vector<DiscrepancyEstimate> result;
  for (std::size_t i = 0; i < pool.n_sources(); ++i) {
    // Runs on the source node against its received copy of the reference.
    auto estimate = empirical_discrepancy(pool.source(i), pool.reference(), relax_config);
    trace.send(source_node(i), kLearnerNode, MessageKind::discrepancy_result, 0, {estimate.value});
    result.push_back(std::move(estimate));
  }
  return trace.finish(std::move(result), std::vector<bool>(pool.n_sources(), attested_nodes));
}

void Case2Options::validate() const {
  if (rounds < 1) throw std::invalid_argument("case 2 needs rounds >= 1");
  if (batch_size < 1) throw std::invalid_argument("case 2 needs batch_size >= 1");
  if (!(step_size > 0.0)) throw std::invalid_argument("case 2 needs a positive step size");
  if (!(ridge >= 0.0)) throw std::invalid_argument("case 2 ridge must be >= 0");
}

ProtocolTrace run_case2(const SourcePool& pool, const Case2Options& opt) {
  opt.validate();
  const std::size_t n = pool.n_sources();
  const auto d = static_cast<Eigen::Index>(pool.n_features());
  const Dataset& reference = pool.reference();

  IndexList all_reference(reference.size());
  for (std::size_t j = 0; j < all_reference.size(); ++j) all_reference[j] = j;

  struct SourceState {
    Vector params;
    Rng rng;
    IndexList order;
  };
  std::vector<SourceState> state;
  for (std::size_t i = 0; i < n; ++i) {
    IndexList order(pool.source(i).size());
    for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
    state.push_back({Vector::Zero(d + 1), Rng(derive_seed(opt.seed, i)), std::move(order)});
  }

  TraceBuilder trace(2);
  for (int round = 0; round < opt.rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      auto& s = state[i];
      const Dataset& source = pool.source(i);
      trace.send(kLearnerNode, source_node(i), MessageKind::model_query, round, to_payload(s.params));

      // Source side: minibatch gradient of its flipped-label term.
      std::span<const std::size_t> batch(s.order);
      if (opt.batch_size < source.size()) {
        for (std::size_t k = 0; k < opt.batch_size; ++k) {
          std::uniform_int_distribution<std::size_t> pick(k, s.order.size() - 1);
          std::swap(s.order[k], s.order[pick(s.rng)]);
        }
        batch = batch.first(opt.batch_size);
      }
      const Vector source_grad = squared_term_gradient(source, batch, /*flip=*/true, s.params);
      trace.send(source_node(i), kLearnerNode, MessageKind::gradient_reply, round, to_payload(source_grad));

      // Learner side.
      Vector grad = source_grad + squared_term_gradient(reference, all_reference, /*flip=*/false, s.params);
      grad.head(d) += opt.ridge * s.params.head(d);
      if (!grad.allFinite()) throw NumericalError("non-finite gradient in case 2 protocol for source " + std::to_string(i));
      s.params -= opt.step_size * grad;
      if (!s.params.allFinite()) throw NumericalError("case 2 iterate diverged for source " + std::to_string(i));
    }
  }

  std::vector<DiscrepancyEstimate> result;
  for (std::size_t i = 0; i < n; ++i) {
    const auto h = LinearPredictor::from_stacked(state[i].params);
    trace.send(kLearnerNode, source_node(i), MessageKind::model_query, opt.rounds, to_payload(state[i].params));
    const Dataset& source = pool.source(i);
    const double source_risk =
        static_cast<double>(flipped_source_errors(h, source)) / static_cast<double>(source.size());
    trace.send(source_node(i), kLearnerNode, MessageKind::discrepancy_result, opt.rounds, {source_risk});

    const double value = discrepancy_from_risks(source_risk, reference, h);
    const double reference_risk = static_cast<double>(count_errors(h, reference)) / static_cast<double>(reference.size());
    result.push_back({value, source_risk + reference_risk, source.source_id()});
  }
  return trace.finish(std::move(result), std::vector<bool>(n, false));
}

std::vector<double> replay_trace(const ProtocolTrace& trace, const Dataset& reference, std::size_t n_sources) {
  std::vector<double> out(n_sources, 0.0);
  std::vector<Vector> last_query(n_sources);
  for (const auto& m : trace.messages) {
    if (m.kind == MessageKind::model_query && m.to != kLearnerNode) {
      last_query.at(m.to - 1) = Eigen::Map<const Vector>(m.payload.data(), static_cast<Eigen::Index>(m.payload.size()));
    } else if (m.kind == MessageKind::discrepancy_result) {
      const std::size_t i = m.from - 1;
      if (m.payload.size() != 1) throw std::invalid_argument("discrepancy_result carries one real");
      if (trace.protocol_case == 1) {
        out.at(i) = m.payload[0];
      } else {
        out.at(i) = discrepancy_from_risks(m.payload[0], reference, LinearPredictor::from_stacked(last_query.at(i)));
      }
    }
  }
  return out;
}

void write_trace_jsonl(const ProtocolTrace& trace, std::ostream& out) {
  for (const auto& m : trace.messages) {
    nlohmann::json j{{"from", m.from},
                     {"to", m.to},
                     {"kind", to_string(m.kind)},
                     {"payload_size", m.payload_size},
                     {"round", m.round}};
    out << j.dump() << '\n';
  }
}

}  // namespace msrobust
