#include <algorithm>

#include "noisybeep/apps.hpp"

namespace nbeep {

namespace {

std::size_t id_bits(std::size_t n_bound) { return std::min<std::size_t>(3 * ceil_log2(n_bound) + 10, 62); }

// One window of `window` slots per identifier bit, most significant first.
// Live candidates holding a 1 start a wave in the window's first slot; any
// node hearing the wave repeats it once in the next slot, so it covers
// distance `window` before the window closes. A candidate holding a 0 that
// sees the wave stops competing. Every node records the wave bits, which
// spell the largest identifier.
class LeaderNode final : public BeepNode {
 public:
  LeaderNode(std::size_t bits, std::size_t window, std::uint64_t id)
      : bits_(bits), window_(window), id_(id) {}

  NodeAction next_action() override {
    if (t_ >= bits_ * window_) return NodeAction::Terminate;
    const std::size_t slot = t_ % window_;
    if (slot == 0) {
      wave_ = false;
      beeped_ = false;
      relay_ = false;
      if (candidate_ && bit(t_ / window_)) {
        wave_ = true;
        beeped_ = true;
        return NodeAction::Beep;
      }
      return NodeAction::Listen;
    }
    if (relay_) {
      relay_ = false;
      beeped_ = true;
      return NodeAction::Beep;
    }
    return NodeAction::Listen;
  }

  void absorb(Observation obs) override {
    const std::size_t slot = t_ % window_;
    const std::size_t j = t_ / window_;
    ++t_;
    if (heard_beep(obs)) {
      wave_ = true;
      if (!beeped_ && slot + 1 < window_) relay_ = true;
    }
    if (slot + 1 == window_) {
      if (candidate_ && !bit(j) && wave_) candidate_ = false;
      elected_ = (elected_ << 1) | (wave_ ? 1U : 0U);
    }
  }

  std::int64_t output() const override { return t_ >= bits_ * window_ ? std::int64_t(elected_) : -1; }

 private:
  bool bit(std::size_t j) const { return (id_ >> (bits_ - 1 - j)) & 1U; }

  std::size_t bits_;
  std::size_t window_;
  std::uint64_t id_;
  std::uint64_t t_ = 0;
  std::uint64_t elected_ = 0;
  bool candidate_ = true;
  bool wave_ = false;
  bool beeped_ = false;
  bool relay_ = false;
};

class LeaderProtocol final : public BeepProtocol {
 public:
  LeaderProtocol(std::size_t n_bound, std::size_t diameter_bound)
      : n_bound_(n_bound), bits_(id_bits(n_bound)), window_(std::max<std::size_t>(1, diameter_bound)) {}
  std::string name() const override { return "leader-election"; }
  Model model() const override { return Model::BL; }
  std::size_t length() const override { return bits_ * window_; }
  std::unique_ptr<BeepNode> make_node(NodeId, std::uint64_t seed) const override {
    return std::make_unique<LeaderNode>(bits_, window_, leader_identifier(n_bound_, seed));
  }

 private:
  std::size_t n_bound_;
  std::size_t bits_;
  std::size_t window_;
};

}  // namespace

std::uint64_t leader_identifier(std::size_t n_bound, std::uint64_t node_seed) {
  Rng rng(node_seed);
  return rng() & ((1ULL << id_bits(n_bound)) - 1);
}

std::unique_ptr<BeepProtocol> leader_election_protocol(std::size_t n_bound, std::size_t diameter_bound) {
  return std::make_unique<LeaderProtocol>(n_bound, diameter_bound);
}

}  // namespace nbeep
