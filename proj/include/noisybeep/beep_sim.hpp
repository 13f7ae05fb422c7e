#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "noisybeep/channel.hpp"
#include "noisybeep/collision.hpp"

namespace nbeep {

/// A node of a beeping protocol: a NodeProgram with a final output value.
class BeepNode : public NodeProgram {
 public:
  /// Task-specific output (MIS membership, color, leader id, ...); -1 when undecided.
  virtual std::int64_t output() const = 0;
};

/// Factory for the per-node state machines of a protocol written for one model.
class BeepProtocol {
 public:
  virtual ~BeepProtocol() = default;
  virtual std::string name() const = 0;
  virtual Model model() const = 0;
  /// Declared round bound R.
  virtual std::size_t length() const = 0;
  /// `seed` is the node's private random stream; nodes are anonymous and must
  /// not rely on `id` beyond bookkeeping.
  virtual std::unique_ptr<BeepNode> make_node(NodeId id, std::uint64_t seed) const = 0;
};

struct RoundRecord {
  std::uint64_t round = 0;
  NodeId node = 0;
  Action action = Action::Listen;
  std::optional<CDOutcome> cd;  // empty for direct runs
  Observation observation = Observation::None;
};

struct SimFault {
  std::uint64_t round = 0;
  NodeId node = 0;
  std::string what;
};

struct ProtocolRun {
  std::vector<std::int64_t> outputs;
  std::uint64_t rounds = 0;  // protocol rounds executed
  std::uint64_t slots = 0;   // physical slots used
  std::size_t n_c = 1;       // slots per round (1 for direct runs)
  bool all_terminated = false;
  std::vector<SimFault> faults;
  std::vector<RoundRecord> transcript;  // filled only when requested
};

/// Seed of node v's protocol stream; shared by direct and simulated runs.
std::uint64_t node_seed(std::uint64_t seed, NodeId v);

/// Runs the protocol noiselessly on its declared model for at most length() rounds.
ProtocolRun run_direct(const BeepProtocol& protocol, const Topology& topology, std::uint64_t seed,
                       bool record = false);

struct MappedOutcome {
  Observation observation;
  bool fault = false;  // an active node decoded Silence
};

/// Translates a collision-detection outcome into what `model` would have shown the node.
MappedOutcome map_outcome(CDOutcome cd, bool was_active, Model model);

struct SimOptions {
  std::optional<std::size_t> rounds_bound;  // overrides protocol.length() for parameter choice
  std::optional<double> delta;              // overrides default_delta(epsilon)
  bool record = false;
};

/// Simulates the protocol over BLeps: each protocol round becomes one
/// collision-detection instance of n_c slots, with parameters from
/// choose_cd_params(n, R, epsilon, target_failure).
ProtocolRun simulate_noisy(const BeepProtocol& protocol, const Topology& topology, double epsilon,
                           double target_failure, std::uint64_t seed, const SimOptions& options = {});

/// Same, with caller-supplied parameters.
ProtocolRun simulate_noisy(const BeepProtocol& protocol, const Topology& topology, const CDParams& params,
                           std::uint64_t seed, const SimOptions& options = {});

/// One JSON object per line: {"round","node","action","cd_outcome","mapped_observation"}.
void write_transcript_jsonl(std::ostream& out, const std::vector<RoundRecord>& transcript);

}  // namespace nbeep
