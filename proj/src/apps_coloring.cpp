#include <stdexcept>

#include "noisybeep/apps.hpp"

namespace nbeep {

namespace {

std::size_t coloring_phases(std::size_t n_bound) { return 6 * ceil_log2(n_bound) + 16; }

// Uniform choice among colors not yet struck; -1 when none is left.
std::int64_t pick_free(const std::vector<bool>& taken, Rng& rng) {
  std::size_t free = 0;
  for (bool t : taken) free += !t;
  if (free == 0) return -1;
  std::uint64_t r = uniform_below(rng, free);
  for (std::size_t c = 0; c < taken.size(); ++c) {
    if (taken[c]) continue;
    if (r-- == 0) return std::int64_t(c);
  }
  return -1;
}

// Per phase, color i owns slots 2i (holders announce) and 2i+1 (proposals).
class ColoringNode final : public BeepNode {
 public:
  ColoringNode(std::size_t K, std::uint64_t seed) : K_(K), rng_(seed), taken_(K, false) {}

  NodeAction next_action() override {
    const std::size_t pos = t_ % (2 * K_);
    if (pos == 0) {
      if (color_ >= 0 && announced_) return NodeAction::Terminate;
      announcing_ = color_ >= 0;
      withdrawn_ = false;
      proposal_ = color_ < 0 ? pick_free(taken_, rng_) : -1;
    }
    const auto c = std::int64_t(pos / 2);
    if (pos % 2 == 0) return announcing_ && color_ == c ? NodeAction::Beep : NodeAction::Listen;
    return proposal_ == c && !withdrawn_ ? NodeAction::Beep : NodeAction::Listen;
  }

  void absorb(Observation obs) override {
    const std::size_t pos = t_ % (2 * K_);
    ++t_;
    const auto c = std::int64_t(pos / 2);
    if (pos % 2 == 0) {
      if (heard_beep(obs)) {
        taken_[c] = true;
        if (proposal_ == c) withdrawn_ = true;
      }
    } else if (proposal_ == c && !withdrawn_ && obs == Observation::Alone) {
      color_ = c;
    }
    if (pos + 1 == 2 * K_ && announcing_) announced_ = true;
  }

  std::int64_t output() const override { return color_; }

 private:
  std::size_t K_;
  Rng rng_;
  std::vector<bool> taken_;
  std::uint64_t t_ = 0;
  std::int64_t color_ = -1;
  std::int64_t proposal_ = -1;
  bool withdrawn_ = false;
  bool announcing_ = false;
  bool announced_ = false;
};

class ColoringProtocol final : public BeepProtocol {
 public:
  ColoringProtocol(std::size_t K, std::size_t n_bound) : K_(K), phases_(coloring_phases(n_bound)) {}
  std::string name() const override { return "coloring"; }
  Model model() const override { return Model::BcdL; }
  std::size_t length() const override { return phases_ * 2 * K_; }
  std::unique_ptr<BeepNode> make_node(NodeId, std::uint64_t seed) const override {
    return std::make_unique<ColoringNode>(K_, seed);
  }

 private:
  std::size_t K_;
  std::size_t phases_;
};

// Per phase, color i owns four slots:
//   H1  holders of i beep; listeners strike i and arm a relay
//   H2  relays beep; listeners strike i
//   P1  proposers of i beep; a listener hearing Many arms a conflict relay
//   P2  conflict relays beep; a proposer that was alone in P1 and hears
//       nothing here keeps i
// followed by one slot where undecided nodes beep. A decided node that has
// announced its color and heard silence there is no longer needed as a relay.
class TwoHopNode final : public BeepNode {
 public:
  TwoHopNode(std::size_t P, std::uint64_t seed) : P_(P), rng_(seed), taken_(P, false) {}

  NodeAction next_action() override {
    const std::size_t pos = t_ % phase_len();
    if (pos == 0) {
      if (color_ >= 0 && announced_ && quiet_) return NodeAction::Terminate;
      announcing_ = color_ >= 0 && !announced_;
      withdrawn_ = false;
      proposal_ = color_ < 0 ? pick_free(taken_, rng_) : -1;
    }
    if (pos == 4 * P_) return color_ < 0 ? NodeAction::Beep : NodeAction::Listen;
    const auto c = std::int64_t(pos / 4);
    switch (pos % 4) {
      case 0: return announcing_ && color_ == c ? NodeAction::Beep : NodeAction::Listen;
      case 1: return relay_claim_ ? NodeAction::Beep : NodeAction::Listen;
      case 2: return proposing(c) ? NodeAction::Beep : NodeAction::Listen;
      default: return relay_conflict_ ? NodeAction::Beep : NodeAction::Listen;
    }
  }

  void absorb(Observation obs) override {
    const std::size_t pos = t_ % phase_len();
    ++t_;
    if (pos == 4 * P_) {
      if (color_ >= 0) {
        if (announcing_) announced_ = true;
        quiet_ = obs == Observation::Silence;
      }
      return;
    }
    const auto c = std::int64_t(pos / 4);
    switch (pos % 4) {
      case 0:
        if (heard_beep(obs)) {
          strike(c);
          relay_claim_ = true;
        }
        break;
      case 1:
        if (relay_claim_) {
          relay_claim_ = false;
        } else if (heard_beep(obs)) {
          strike(c);
        }
        break;
      case 2:
        if (proposing(c)) {
          alone_ = obs == Observation::Alone;
        } else if (obs == Observation::Many) {
          relay_conflict_ = true;
        }
        break;
      default:
        if (relay_conflict_) {
          relay_conflict_ = false;
        } else if (proposing(c) && alone_ && !heard_beep(obs)) {
          color_ = c;
        }
        break;
    }
  }

  std::int64_t output() const override { return color_; }

 private:
  std::size_t phase_len() const { return 4 * P_ + 1; }
  bool proposing(std::int64_t c) const { return color_ < 0 && proposal_ == c && !withdrawn_; }
  void strike(std::int64_t c) {
    taken_[c] = true;
    if (proposal_ == c) withdrawn_ = true;
  }

  std::size_t P_;
  Rng rng_;
  std::vector<bool> taken_;
  std::uint64_t t_ = 0;
  std::int64_t color_ = -1;
  std::int64_t proposal_ = -1;
  bool withdrawn_ = false;
  bool alone_ = false;
  bool relay_claim_ = false;
  bool relay_conflict_ = false;
  bool announcing_ = false;
  bool announced_ = false;
  bool quiet_ = false;
};

class TwoHopProtocol final : public BeepProtocol {
 public:
  TwoHopProtocol(std::size_t P, std::size_t n_bound) : P_(P), phases_(coloring_phases(n_bound)) {}
  std::string name() const override { return "two-hop-coloring"; }
  Model model() const override { return Model::BcdLcd; }
  std::size_t length() const override { return phases_ * (4 * P_ + 1); }
  std::unique_ptr<BeepNode> make_node(NodeId, std::uint64_t seed) const override {
    return std::make_unique<TwoHopNode>(P_, seed);
  }

 private:
  std::size_t P_;
  std::size_t phases_;
};

}  // namespace

std::unique_ptr<BeepProtocol> coloring_protocol(std::size_t K, std::size_t n_bound, std::size_t degree_bound) {
  if (K < degree_bound + 1) throw std::invalid_argument("coloring_protocol: palette must exceed the degree bound");
  return std::make_unique<ColoringProtocol>(K, n_bound);
}

std::size_t two_hop_palette(std::size_t n_bound, std::size_t degree_bound) {
  return std::max<std::size_t>(1, std::min(n_bound, degree_bound * degree_bound + ceil_log2(n_bound)));
}

std::unique_ptr<BeepProtocol> two_hop_coloring_protocol(std::size_t n_bound, std::size_t degree_bound) {
  return std::make_unique<TwoHopProtocol>(two_hop_palette(n_bound, degree_bound), n_bound);
}

ColorAssignment two_hop_coloring(const Topology& topology, std::uint64_t seed) {
  const std::size_t n = topology.node_count();
  const auto protocol = two_hop_coloring_protocol(n, topology.max_degree());
  ColorAssignment out{run_direct(*protocol, topology, seed).outputs, two_hop_palette(n, topology.max_degree())};
  if (!verify_coloring(topology, out, 2)) throw std::runtime_error("two_hop_coloring: protocol did not converge");
  return out;
}

}  // namespace nbeep
