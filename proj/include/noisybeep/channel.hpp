#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "noisybeep/rng.hpp"
#include "noisybeep/topology.hpp"

namespace nbeep {

/// Beeping model variants. "cd" on the B side: a beeper learns whether another
/// neighbor beeped; on the L side: a listener tells one beeper from many.
/// BLeps is BL with receiver-side noise.
enum class Model : std::uint8_t { BL, BcdL, BLcd, BcdLcd, BLeps };

enum class Action : std::uint8_t { Listen, Beep };

/// What a node perceives at the end of a slot (or simulated round).
enum class Observation : std::uint8_t {
  None,      // beeper without beeper-side collision detection, or no observation
  Silence,   // listener: no beeping neighbor
  Beep,      // listener: at least one beeping neighbor (no listener cd)
  One,       // listener with cd: exactly one beeping neighbor
  Many,      // listener with cd: two or more beeping neighbors
  Alone,     // beeper with cd: no neighbor beeped
  NotAlone,  // beeper with cd: some neighbor also beeped
};

std::string_view to_string(Model m) noexcept;
std::string_view to_string(Action a) noexcept;
std::string_view to_string(Observation o) noexcept;
Model parse_model(std::string_view s);

constexpr bool beeper_cd(Model m) noexcept { return m == Model::BcdL || m == Model::BcdLcd; }
constexpr bool listener_cd(Model m) noexcept { return m == Model::BLcd || m == Model::BcdLcd; }

/// Collapses a listener observation to the plain {Silence, Beep} alphabet.
constexpr bool heard_beep(Observation o) noexcept {
  return o == Observation::Beep || o == Observation::One || o == Observation::Many;
}

struct NoiseConfig {
  double epsilon = 0.0;
  std::uint64_t seed = 0;
};

/// One synchronous beeping channel over a fixed topology.
///
/// Noise (BLeps only) is one independent draw per (listener, slot), consumed in
/// ascending node id, from a stream seeded by NoiseConfig::seed. Beepers in BL
/// and BLeps observe nothing. Collision-detection observations exist only in
/// the noiseless variants.
class Channel {
 public:
  /// Throws std::invalid_argument when epsilon is nonzero on a noiseless
  /// variant or outside [0, 1/2) on BLeps.
  Channel(const Topology& topology, Model model, NoiseConfig noise = {});

  /// Executes one slot. `actions` and `out` must both have one entry per node.
  void step(std::span<const Action> actions, std::span<Observation> out);

  const Topology& topology() const noexcept { return *topology_; }
  Model model() const noexcept { return model_; }
  double epsilon() const noexcept { return epsilon_; }
  std::uint64_t slots() const noexcept { return slots_; }
  /// Largest number of beepers in any closed neighborhood during the last slot.
  std::size_t last_max_closed_beepers() const noexcept { return last_max_closed_; }
  /// Running maximum of last_max_closed_beepers() over all slots.
  std::size_t max_closed_beepers() const noexcept { return max_closed_; }

 private:
  const Topology* topology_;
  Model model_;
  double epsilon_;
  Rng noise_rng_;
  BernoulliThreshold flip_;
  std::vector<std::uint32_t> beeping_neighbors_;
  std::vector<NodeId> touched_;
  std::uint64_t slots_ = 0;
  std::size_t last_max_closed_ = 0;
  std::size_t max_closed_ = 0;
};

/// Per-node decision for the next slot.
enum class NodeAction : std::uint8_t { Listen, Beep, Terminate };

/// A node's state machine. Terminated nodes stay silent and receive nothing.
class NodeProgram {
 public:
  virtual ~NodeProgram() = default;
  virtual NodeAction next_action() = 0;
  virtual void absorb(Observation obs) = 0;
};

struct SlotRecord {
  Action action;
  Observation observation;
  friend bool operator==(const SlotRecord&, const SlotRecord&) = default;
};

struct RunResult {
  std::vector<std::vector<SlotRecord>> transcripts;  // per node, one record per executed slot
  std::uint64_t slots_used = 0;
  std::vector<NodeId> unterminated;  // nodes still running when max_slots ran out
  bool all_terminated() const noexcept { return unterminated.empty(); }
};

/// Drives `programs` (one per node) over `channel` until every node has
/// terminated or `max_slots` slots have executed.
RunResult run_rounds(Channel& channel, std::span<const std::unique_ptr<NodeProgram>> programs,
                     std::uint64_t max_slots, bool record_transcripts = true);

}  // namespace nbeep
