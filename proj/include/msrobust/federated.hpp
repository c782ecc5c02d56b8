#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "msrobust/data.hpp"
#include "msrobust/discrepancy.hpp"

namespace msrobust {

// Deterministic simulation of decentralized discrepancy estimation. Node 0 is
// the learner, which holds the reference; node i + 1 is source i.

using NodeId = std::uint32_t;
inline constexpr NodeId kLearnerNode = 0;
inline NodeId source_node(std::size_t source_index) { return static_cast<NodeId>(source_index + 1); }

/// Wire accounting: 8 bytes per real, no headers.
inline constexpr std::size_t kBytesPerReal = 8;

enum class MessageKind { reference_broadcast, discrepancy_result, model_query, gradient_reply };
std::string to_string(MessageKind kind);

struct Message {
  NodeId from = 0;
  NodeId to = 0;
  MessageKind kind = MessageKind::model_query;
  std::size_t payload_size = 0;  // bytes
  int round = 0;
  std::vector<double> payload;   // kept in memory for replay; not exported
};

struct ProtocolTrace {
  int protocol_case = 1;
  std::vector<Message> messages;
  std::size_t total_bytes = 0;
  int rounds = 0;
  std::vector<DiscrepancyEstimate> result;
  std::vector<bool> attested;  // per source node: runs inside trusted hardware (no cryptographic content)
};

/// Reference shared with every source; each source computes its own
/// discrepancy locally and returns the single number.
ProtocolTrace run_case1(const SourcePool& pool, const TrainConfig& relax_config = default_relax_config(),
                        bool attested_nodes = false);

struct Case2Options {
  int rounds = 1000;
  std::size_t batch_size = 32;
  double step_size = 0.1;
  std::uint64_t seed = 0;
  double ridge = kRelaxationRidge;

  void validate() const;
};

/// Reference never leaves the learner. Per source the learner runs gradient
/// descent on the flipped-label squared objective, querying the source for
/// the gradient of its term on a seed-chosen minibatch each round, then asks
/// once more for the source's 0/1 risk under the final candidate.
ProtocolTrace run_case2(const SourcePool& pool, const Case2Options& options);

/// Recomputes the per-source discrepancy values from the message log alone
/// (plus the learner's own reference data for Case 2).
std::vector<double> replay_trace(const ProtocolTrace& trace, const Dataset& reference, std::size_t n_sources);

/// One JSON object per line: from, to, kind, payload_size, round.
void write_trace_jsonl(const ProtocolTrace& trace, std::ostream& out);

}  // namespace msrobust
