#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include "noisybeep/beep_sim.hpp"
#include "noisybeep/topology.hpp"

namespace nbeep {

/// ceil(log2(n)), with 0 for n <= 1.
std::size_t ceil_log2(std::size_t n) noexcept;

/// Maximal independent set (BcdLcd). Phases of b = 2*ceil(log2 n_bound) + 2 bit
/// rounds, one tie-check round and one announce round. Each undecided node draws
/// a b-bit number and announces it MSB first (beep on 1); a node holding a 0
/// that hears a beep drops out for the phase. Survivors beep in the check
/// round and join unless another survivor answered; joiners beep in the
/// announce round and their neighbors leave. Output 1 (in), 0 (out), -1.
std::unique_ptr<BeepProtocol> mis_protocol(std::size_t n_bound);

/// Proper coloring with palette K (BcdL). Each phase has two slots per color:
/// nodes that fixed the color in the previous phase beep in the first one
/// (neighbors strike it from their palette), proposers beep in the second and
/// keep the color when they beep alone. Output is the color or -1.
/// Throws std::invalid_argument if K < degree_bound + 1.
std::unique_ptr<BeepProtocol> coloring_protocol(std::size_t K, std::size_t n_bound, std::size_t degree_bound);

/// Palette for 2-hop coloring: min(n_bound, degree_bound^2 + ceil(log2 n_bound)), at least 1.
std::size_t two_hop_palette(std::size_t n_bound, std::size_t degree_bound);

/// Distance-2 coloring (BcdLcd): the 1-hop scheme run on the square graph,
/// with neighbors relaying claims and conflicts one more hop.
std::unique_ptr<BeepProtocol> two_hop_coloring_protocol(std::size_t n_bound, std::size_t degree_bound);

/// Leader election (BL) by beep waves: 3*ceil(log2 n_bound) + 10 identifier bits,
/// one wave window of max(1, diameter_bound) slots per bit. Output is the
/// elected identifier.
std::unique_ptr<BeepProtocol> leader_election_protocol(std::size_t n_bound, std::size_t diameter_bound);

/// The identifier a leader-election node draws from its private seed.
std::uint64_t leader_identifier(std::size_t n_bound, std::uint64_t node_seed);

struct ColorAssignment {
  std::vector<std::int64_t> color;
  std::size_t palette = 0;
  std::size_t colors_used() const;
};

bool verify_mis(const Topology& topology, const std::vector<bool>& in_set);
/// hops is 1 or 2. Uncolored nodes and colors outside [0, palette) fail.
bool verify_coloring(const Topology& topology, const ColorAssignment& coloring, int hops);
/// Unanimous, and exactly one node owns the agreed identifier.
bool verify_leader(const std::vector<std::int64_t>& outputs, const std::vector<std::uint64_t>& own_ids);

/// Runs two_hop_coloring_protocol noiselessly; throws std::runtime_error if the
/// result is not a valid 2-hop coloring.
ColorAssignment two_hop_coloring(const Topology& topology, std::uint64_t seed);

enum class App : std::uint8_t { MIS, Coloring, TwoHopColoring, LeaderElection };
std::string_view to_string(App a) noexcept;
App parse_app(std::string_view s);
inline constexpr App kAllApps[] = {App::MIS, App::Coloring, App::TwoHopColoring, App::LeaderElection};

/// Instantiates an application with bounds taken from the topology itself
/// (n, max degree, diameter). Leader election requires a connected topology.
/// Coloring uses K = max degree + max(1, ceil(log2 n)).
std::unique_ptr<BeepProtocol> make_app(App app, const Topology& topology);

/// Checks a run's outputs with the matching verifier. `seed` is the run seed,
/// needed to recover leader-election identifiers.
bool verify_app(App app, const Topology& topology, const std::vector<std::int64_t>& outputs, std::uint64_t seed);

}  // namespace nbeep
