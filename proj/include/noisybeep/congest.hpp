#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "noisybeep/apps.hpp"
#include "noisybeep/codes.hpp"
#include "noisybeep/topology.hpp"

namespace nbeep {

/// A B-bit message (B <= 64).
using Message = std::uint64_t;

/// Per node, the neighbor behind each port. Nodes only ever see port indices;
/// the peer ids let a harness arrange inputs and check outputs.
using PortMap = std::vector<std::vector<NodeId>>;

/// Ports ordered by ascending neighbor color (neighbor colors must be distinct).
PortMap ports_by_color(const Topology& topology, const std::vector<std::int64_t>& colors);
/// Ports ordered by ascending neighbor id.
PortMap ports_by_id(const Topology& topology);

/// One node of a fully utilized CONGEST(B) protocol.
class CongestNode {
 public:
  virtual ~CongestNode() = default;
  /// One message per port for round t (values must fit in B bits).
  virtual std::vector<Message> send(std::size_t t) = 0;
  /// One message per port, as delivered in round t.
  virtual void receive(std::size_t t, std::span<const Message> messages) = 0;
  virtual std::vector<std::int64_t> output() const = 0;
};

class CongestProtocol {
 public:
  virtual ~CongestProtocol() = default;
  virtual std::string name() const = 0;
  virtual std::size_t message_bits() const = 0;
  virtual std::size_t rounds() const = 0;
  /// `port_peers[p]` is the neighbor behind port p, or kUnknownPeer.
  virtual std::unique_ptr<CongestNode> make_node(NodeId id, std::span<const NodeId> port_peers) const = 0;
};

inline constexpr NodeId kUnknownPeer = ~NodeId{0};

struct CongestRun {
  std::vector<std::vector<std::int64_t>> outputs;
  std::size_t rounds = 0;
};

/// Reference message-passing execution.
CongestRun run_congest_direct(const CongestProtocol& protocol, const Topology& topology, const PortMap& ports);

/// Sends each B-bit message over B consecutive one-bit rounds, most significant bit first.
std::shared_ptr<const CongestProtocol> bit_expand(std::shared_ptr<const CongestProtocol> pi);

struct RobustLayer {
  enum class Kind : std::uint8_t { Identity, Repetition };
  Kind kind = Kind::Identity;
  std::size_t k = 1;  // repetitions

  static RobustLayer identity() { return {}; }
  static RobustLayer repetition(std::size_t k);
  std::string name() const;
  static RobustLayer parse(const std::string& s);  // "identity" or "repetition:K"
};

/// Wraps a one-bit protocol. Repetition sends every bit k times and takes the
/// majority (ties read as 0).
std::shared_ptr<const CongestProtocol> apply_robust(std::shared_ptr<const CongestProtocol> bit_protocol,
                                                     const RobustLayer& layer);

/// What a node learns about its neighborhood before the main loop.
struct Colorset {
  std::int64_t own = -1;
  std::vector<std::int64_t> neighbor_colors;  // ascending; port p <-> neighbor_colors[p]
  std::vector<std::vector<std::int64_t>> neighbor_colorsets;  // aligned with neighbor_colors
  friend bool operator==(const Colorset&, const Colorset&) = default;
};

/// Throws std::invalid_argument unless two nodes at distance <= 2 always differ.
void require_two_hop(const Topology& topology, const ColorAssignment& coloring);

/// Phase 1 (c rounds): color-i nodes beep in round i. Phase 2 (c^2 rounds):
/// in round (i, j) the color-i nodes beep when j is in their colorset.
/// Noiseless when epsilon == 0, otherwise both phases are simulated over BLeps
/// with failure budget failure_budget/2 each.
std::vector<Colorset> preprocess_colorsets(const Topology& topology, const ColorAssignment& coloring, double epsilon,
                                           double failure_budget, std::uint64_t seed,
                                           std::uint64_t* slots_used = nullptr);

/// Ground-truth colorsets computed directly from the graph.
std::vector<Colorset> true_colorsets(const Topology& topology, const ColorAssignment& coloring);

/// Relabels used colors to 0..c-1 preserving order; palette becomes c.
ColorAssignment compact(const ColorAssignment& coloring);

/// Canonical coloring 0..n-1.
ColorAssignment identity_coloring(std::size_t n);

/// Neighborhood code for TDMA: k_C is the smallest power of two >= max(1, max_degree),
/// n_C = rate_inverse * k_C, and the largest relative distance in
/// {0.45, 0.4, ..., 0.1} that can be built at exactly that length.
BlockCode neighborhood_code(std::size_t max_degree, std::size_t rate_inverse);

struct BlockFailureStats {
  std::uint64_t decodes = 0;
  std::uint64_t failures = 0;
  double rate() const noexcept { return decodes ? double(failures) / double(decodes) : 0.0; }
};

/// Sends uniformly random blocks from one node to a neighbor over BLeps and
/// counts blocks that do not decode back to what was sent.
BlockFailureStats measure_block_failures(const BlockCode& code, double epsilon, std::size_t decodes,
                                         std::uint64_t seed);

struct TdmaOptions {
  double target_failure = 1e-2;  // preprocessing gets a tenth of it
  std::size_t rate_inverse = 4;
};

struct TdmaResult {
  std::vector<std::vector<std::int64_t>> outputs;
  PortMap ports;  // the port order the simulated nodes used
  std::size_t pi_rounds = 0;
  std::size_t Pi_rounds = 0;
  std::size_t colors = 0;  // c
  std::size_t k_C = 0;
  std::size_t n_C = 0;
  std::uint64_t slots = 0;  // main loop only
  std::uint64_t preprocessing_slots = 0;
  std::size_t max_closed_beepers = 0;  // over every main-loop slot
  std::uint64_t decode_failures = 0;   // received blocks that did not decode to the sent block
  std::uint64_t messages = 0;          // received blocks
  bool colorsets_correct = true;
  bool collision_free() const noexcept { return max_closed_beepers <= 1; }
};

/// Algorithm over BLeps: Pi = robust(bit_expand(pi)); each Pi round is c epochs
/// of n_C slots in which the color-i node beeps the encoding of its per-port
/// bits (ascending receiver color, zero-padded to k_C).
TdmaResult tdma_simulate(std::shared_ptr<const CongestProtocol> pi, const Topology& topology,
                         const ColorAssignment& coloring, const RobustLayer& robust, double epsilon,
                         std::uint64_t seed, const TdmaOptions& options = {});

// Built-in protocols --------------------------------------------------------

/// Each node must learn k independent bits from every neighbor (every other
/// node on a clique). Inputs are drawn from `seed` per directed edge and round.
class MessageExchangeTask {
 public:
  MessageExchangeTask(const Topology& topology, std::size_t k, std::uint64_t seed);
  MessageExchangeTask(const MessageExchangeTask&) = delete;
  MessageExchangeTask& operator=(const MessageExchangeTask&) = delete;
  std::shared_ptr<const CongestProtocol> protocol() const { return protocol_; }
  /// Bit sent from u to v in round t.
  bool bit(NodeId u, NodeId v, std::size_t t) const;
  /// Node outputs list, per port and then per round, the received bits.
  bool verify(const std::vector<std::vector<std::int64_t>>& outputs, const PortMap& ports) const;

 private:
  const Topology* topology_;
  std::size_t k_;
  std::uint64_t seed_;
  std::shared_ptr<const CongestProtocol> protocol_;
};

/// Node `root` learns distance 0; every round each node sends its current
/// distance estimate (all ones for unknown). Runs n rounds. Output: {distance or -1}.
std::shared_ptr<const CongestProtocol> bfs_layering_protocol(std::size_t n, NodeId root = 0);
bool verify_bfs(const Topology& topology, const std::vector<std::vector<std::int64_t>>& outputs, NodeId root = 0);

/// Node `root` floods an 8-bit token for n rounds. Output: {token or -1}.
std::shared_ptr<const CongestProtocol> flooding_protocol(std::size_t n, std::uint8_t token, NodeId root = 0);
bool verify_flooding(const Topology& topology, const std::vector<std::vector<std::int64_t>>& outputs,
                     std::uint8_t token, NodeId root = 0);

}  // namespace nbeep
