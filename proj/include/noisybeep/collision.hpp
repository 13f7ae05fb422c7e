#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "noisybeep/channel.hpp"
#include "noisybeep/codes.hpp"

namespace nbeep {

enum class CDOutcome : std::uint8_t { Silence, SingleSender, Collision };
std::string_view to_string(CDOutcome o) noexcept;

/// Nonnegative fraction num/den, used so that classification thresholds are
/// compared exactly.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;
  double value() const noexcept { return double(num) / double(den); }
  /// Nearest fraction with denominator 10^6, reduced.
  static Fraction from_double(double x);
};

/// Parameters of one collision-detection instance.
struct CDParams {
  BalancedCode code;
  Fraction delta;        // relative distance the thresholds assume
  double epsilon = 0.0;  // channel noise
  double predicted_failure = 1.0;  // union-bound estimate recorded by choose_cd_params

  std::size_t n_c() const noexcept { return code.length(); }
  /// (1 + delta/2) / 2
  double alpha() const noexcept { return (1.0 + delta.value() / 2.0) / 2.0; }

  /// Checks delta > 4*epsilon, n_c even and >= 8, and that the code's distance
  /// covers delta. Throws std::invalid_argument otherwise.
  static CDParams make(BalancedCode code, double epsilon);
  /// No invariant checks; for lower-bound experiments with deliberately short codes.
  static CDParams unchecked(BalancedCode code, double epsilon);
};

/// Silence if chi < n_c/4, SingleSender if chi < alpha*n_c, else Collision,
/// evaluated in exact integer arithmetic. Throws std::out_of_range if chi > n_c.
CDOutcome classify_count(std::size_t chi, const CDParams& params);

/// D(x || y) = x ln(x/y) + (1-x) ln((1-x)/(1-y)); x, y in (0,1).
double kl_divergence(double x, double y);

/// Relative distance used for noise level epsilon: 0.3 up to epsilon = 0.07,
/// otherwise the midpoint of (4*epsilon, 1/2) rounded up to a hundredth.
/// Throws std::domain_error when no delta in (4*epsilon, 1/2) exists.
double default_delta(double epsilon);

/// Smallest even n_c >= 8 whose union bound over n nodes and R rounds is at
/// most target_failure, with a code of ceil(log2(n*R/target)) message bits so
/// that two active nodes pick the same codeword with probability <= target/(n*R).
/// target_failure >= 1 returns the floor configuration (n_c = 8, one message bit).
CDParams choose_cd_params(std::size_t n, std::size_t rounds, double epsilon, double target_failure,
                          std::optional<double> delta = std::nullopt);

/// The noise-driven per-node, per-instance failure bound at length n_c
/// (zero when epsilon == 0).
double cd_noise_bound(double delta, double epsilon, std::size_t n_c);

/// Runs collision-detection instances on a channel, reusing buffers.
class CollisionDetector {
 public:
  explicit CollisionDetector(const CDParams& params) : params_(&params) {}

  /// One instance over n_c slots. `codewords[v]` is the codeword node v beeps,
  /// or empty when v is passive. Writes one outcome (and beep count) per node.
  void run(Channel& channel, std::span<const BitVec> codewords, std::span<CDOutcome> outcomes,
           std::span<std::uint32_t> chi = {});

 private:
  const CDParams* params_;
  std::vector<Action> actions_;
  std::vector<Observation> obs_;
  std::vector<std::uint32_t> counts_;
};

struct CDRun {
  std::vector<CDOutcome> outcomes;
  std::vector<std::uint32_t> chi;
  bool codeword_clash = false;  // two active nodes within one closed neighborhood drew the same codeword
};

/// Algorithm over BLeps: active nodes draw uniform codewords from their own
/// streams (seeded from `seed` and the node id); noise comes from a separate stream.
CDRun run_collision_detection(const Topology& topology, std::span<const NodeId> active, const CDParams& params,
                              std::uint64_t seed);

/// Ground truth: number of active nodes in each closed neighborhood, classified.
std::vector<CDOutcome> expected_cd_outcomes(const Topology& topology, std::span<const NodeId> active);

}  // namespace nbeep
