#include <algorithm>
#include <map>
#include <stdexcept>

#include "noisybeep/congest.hpp"

namespace nbeep {

PortMap ports_by_color(const Topology& topology, const std::vector<std::int64_t>& colors) {
  PortMap ports(topology.node_count());
  for (NodeId v = 0; v < topology.node_count(); ++v) {
    auto nb = topology.neighbors(v);
    ports[v].assign(nb.begin(), nb.end());
    std::sort(ports[v].begin(), ports[v].end(), [&](NodeId a, NodeId b) { return colors[a] < colors[b]; });
    for (std::size_t p = 1; p < ports[v].size(); ++p)
      if (colors[ports[v][p - 1]] == colors[ports[v][p]])
        throw std::invalid_argument("ports_by_color: two neighbors share a color");
  }
  return ports;
}

PortMap ports_by_id(const Topology& topology) {
  PortMap ports(topology.node_count());
  for (NodeId v = 0; v < topology.node_count(); ++v) {
    auto nb = topology.neighbors(v);
    ports[v].assign(nb.begin(), nb.end());
  }
  return ports;
}

CongestRun run_congest_direct(const CongestProtocol& protocol, const Topology& topology, const PortMap& ports) {
  const std::size_t n = topology.node_count();
  const std::size_t B = protocol.message_bits();
  const Message limit = B >= 64 ? ~Message{0} : (Message{1} << B) - 1;
  // where[v][p] = (receiver, receiver's port) of the edge leaving v through port p
  std::vector<std::vector<std::pair<NodeId, std::size_t>>> where(n);
  for (NodeId v = 0; v < n; ++v) {
    for (NodeId u : ports[v]) {
      const auto& back = ports[u];
      const auto it = std::find(back.begin(), back.end(), v);
      if (it == back.end()) throw std::invalid_argument("run_congest_direct: port map is not symmetric");
      where[v].push_back({u, std::size_t(it - back.begin())});
    }
  }
  std::vector<std::unique_ptr<CongestNode>> nodes;
  for (NodeId v = 0; v < n; ++v) nodes.push_back(protocol.make_node(v, ports[v]));
  std::vector<std::vector<Message>> inbox(n);
  for (NodeId v = 0; v < n; ++v) inbox[v].resize(ports[v].size());
  for (std::size_t t = 0; t < protocol.rounds(); ++t) {
    for (NodeId v = 0; v < n; ++v) {
      const auto out = nodes[v]->send(t);
      if (out.size() != ports[v].size()) throw std::logic_error("congest node sent the wrong number of messages");
      for (std::size_t p = 0; p < out.size(); ++p) {
        if (out[p] > limit) throw std::logic_error("congest message exceeds B bits");
        inbox[where[v][p].first][where[v][p].second] = out[p];
      }
    }
    for (NodeId v = 0; v < n; ++v) nodes[v]->receive(t, inbox[v]);
  }
  CongestRun run;
  run.rounds = protocol.rounds();
  for (auto& node : nodes) run.outputs.push_back(node->output());
  return run;
}

// bit expansion --------------------------------------------------------------

namespace {

class BitExpandedNode final : public CongestNode {
 public:
  BitExpandedNode(std::unique_ptr<CongestNode> inner, std::size_t B, std::size_t ports)
      : inner_(std::move(inner)), B_(B), assembled_(ports, 0) {}

  std::vector<Message> send(std::size_t r) override {
    const std::size_t i = r % B_;
    if (i == 0) pending_ = inner_->send(r / B_);
    std::vector<Message> bits(pending_.size());
    for (std::size_t p = 0; p < bits.size(); ++p) bits[p] = (pending_[p] >> (B_ - 1 - i)) & 1U;
    return bits;
  }

  void receive(std::size_t r, std::span<const Message> bits) override {
    const std::size_t i = r % B_;
    if (i == 0) std::fill(assembled_.begin(), assembled_.end(), 0);
    for (std::size_t p = 0; p < bits.size(); ++p) assembled_[p] = (assembled_[p] << 1) | (bits[p] & 1U);
    if (i + 1 == B_) inner_->receive(r / B_, assembled_);
  }

  std::vector<std::int64_t> output() const override { return inner_->output(); }

 private:
  std::unique_ptr<CongestNode> inner_;
  std::size_t B_;
  std::vector<Message> pending_;
  std::vector<Message> assembled_;
};

class BitExpanded final : public CongestProtocol {
 public:
  explicit BitExpanded(std::shared_ptr<const CongestProtocol> pi) : pi_(std::move(pi)) {}
  std::string name() const override { return pi_->name() + "/bits"; }
  std::size_t message_bits() const override { return 1; }
  std::size_t rounds() const override { return pi_->rounds() * pi_->message_bits(); }
  std::unique_ptr<CongestNode> make_node(NodeId id, std::span<const NodeId> peers) const override {
    return std::make_unique<BitExpandedNode>(pi_->make_node(id, peers), pi_->message_bits(), peers.size());
  }

 private:
  std::shared_ptr<const CongestProtocol> pi_;
};

class RepeatedNode final : public CongestNode {
 public:
  RepeatedNode(std::unique_ptr<CongestNode> inner, std::size_t k, std::size_t ports)
      : inner_(std::move(inner)), k_(k), ones_(ports, 0) {}

  std::vector<Message> send(std::size_t r) override {
    if (r % k_ == 0) pending_ = inner_->send(r / k_);
    return pending_;
  }

  void receive(std::size_t r, std::span<const Message> bits) override {
    if (r % k_ == 0) std::fill(ones_.begin(), ones_.end(), 0);
    for (std::size_t p = 0; p < bits.size(); ++p) ones_[p] += bits[p] & 1U;
    if (r % k_ + 1 == k_) {
      std::vector<Message> majority(ones_.size());
      for (std::size_t p = 0; p < ones_.size(); ++p) majority[p] = 2 * ones_[p] > k_ ? 1 : 0;
      inner_->receive(r / k_, majority);
    }
  }

  std::vector<std::int64_t> output() const override { return inner_->output(); }

 private:
  std::unique_ptr<CongestNode> inner_;
  std::size_t k_;
  std::vector<Message> pending_;
  std::vector<std::size_t> ones_;
};

class Repeated final : public CongestProtocol {
 public:
  Repeated(std::shared_ptr<const CongestProtocol> pi, std::size_t k) : pi_(std::move(pi)), k_(k) {}
  std::string name() const override { return pi_->name() + "/rep" + std::to_string(k_); }
  std::size_t message_bits() const override { return 1; }
  std::size_t rounds() const override { return pi_->rounds() * k_; }
  std::unique_ptr<CongestNode> make_node(NodeId id, std::span<const NodeId> peers) const override {
    return std::make_unique<RepeatedNode>(pi_->make_node(id, peers), k_, peers.size());
  }

 private:
  std::shared_ptr<const CongestProtocol> pi_;
  std::size_t k_;
};

}  // namespace

std::shared_ptr<const CongestProtocol> bit_expand(std::shared_ptr<const CongestProtocol> pi) {
  if (pi->message_bits() == 0 || pi->message_bits() > 64) throw std::invalid_argument("bit_expand: need 1 <= B <= 64");
  if (pi->message_bits() == 1) return pi;
  return std::make_shared<BitExpanded>(std::move(pi));
}

RobustLayer RobustLayer::repetition(std::size_t k) {
  if (k == 0) throw std::invalid_argument("repetition layer needs k >= 1");
  return {Kind::Repetition, k};
}

std::string RobustLayer::name() const {
  return kind == Kind::Identity ? "identity" : "repetition:" + std::to_string(k);
}

RobustLayer RobustLayer::parse(const std::string& s) {
  if (s == "identity") return identity();
  const std::string prefix = "repetition:";
  if (s.rfind(prefix, 0) == 0) return repetition(std::stoul(s.substr(prefix.size())));
  throw std::invalid_argument("unknown robust layer: " + s);
}

std::shared_ptr<const CongestProtocol> apply_robust(std::shared_ptr<const CongestProtocol> bit_protocol,
                                                     const RobustLayer& layer) {
  if (bit_protocol->message_bits() != 1) throw std::invalid_argument("apply_robust: expects a one-bit protocol");
  if (layer.kind == RobustLayer::Kind::Identity || layer.k == 1) return bit_protocol;
  return std::make_shared<Repeated>(std::move(bit_protocol), layer.k);
}

// colorsets ------------------------------------------------------------------

void require_two_hop(const Topology& topology, const ColorAssignment& coloring) {
  if (!verify_coloring(topology, coloring, 2)) throw std::invalid_argument("coloring is not a valid 2-hop coloring");
}

std::vector<Colorset> true_colorsets(const Topology& topology, const ColorAssignment& coloring) {
  const std::size_t n = topology.node_count();
  std::vector<std::vector<std::int64_t>> own(n);
  for (NodeId v = 0; v < n; ++v) {
    for (NodeId u : topology.neighbors(v)) own[v].push_back(coloring.color[u]);
    std::sort(own[v].begin(), own[v].end());
  }
  std::vector<Colorset> sets(n);
  for (NodeId v = 0; v < n; ++v) {
    sets[v].own = coloring.color[v];
    sets[v].neighbor_colors = own[v];
    std::map<std::int64_t, NodeId> by_color;
    for (NodeId u : topology.neighbors(v)) by_color[coloring.color[u]] = u;
    for (auto c : own[v]) sets[v].neighbor_colorsets.push_back(own[by_color[c]]);
  }
  return sets;
}

namespace {

// Phase 1: round i, color-i nodes beep. What a node hears is written straight
// into the caller's table.
class ColorBeacon final : public BeepNode {
 public:
  ColorBeacon(std::int64_t color, std::size_t c, std::vector<bool>* heard)
      : color_(color), c_(c), heard_(heard) {}
  NodeAction next_action() override {
    if (t_ >= c_) return NodeAction::Terminate;
    return std::int64_t(t_) == color_ ? NodeAction::Beep : NodeAction::Listen;
  }
  void absorb(Observation obs) override {
    if (heard_beep(obs)) (*heard_)[t_] = true;
    ++t_;
  }
  std::int64_t output() const override { return 0; }

 private:
  std::int64_t color_;
  std::size_t c_;
  std::vector<bool>* heard_;
  std::size_t t_ = 0;
};

class ColorBeaconProtocol final : public BeepProtocol {
 public:
  ColorBeaconProtocol(const ColorAssignment& coloring, std::vector<std::vector<bool>>& heard)
      : coloring_(coloring), heard_(heard) {}
  std::string name() const override { return "colorset-phase1"; }
  Model model() const override { return Model::BL; }
  std::size_t length() const override { return coloring_.palette; }
  std::unique_ptr<BeepNode> make_node(NodeId id, std::uint64_t) const override {
    return std::make_unique<ColorBeacon>(coloring_.color[id], coloring_.palette, &heard_[id]);
  }

 private:
  const ColorAssignment& coloring_;
  std::vector<std::vector<bool>>& heard_;
};

// Phase 2: round i*c + j, color-i nodes beep if j is in their colorset.
class ColorsetRelay final : public BeepNode {
 public:
  ColorsetRelay(std::int64_t color, std::size_t c, const std::vector<bool>* mine, std::vector<bool>* heard)
      : color_(color), c_(c), mine_(mine), heard_(heard) {}
  NodeAction next_action() override {
    if (t_ >= c_ * c_) return NodeAction::Terminate;
    const std::size_t i = t_ / c_, j = t_ % c_;
    return std::int64_t(i) == color_ && (*mine_)[j] ? NodeAction::Beep : NodeAction::Listen;
  }
  void absorb(Observation obs) override {
    if (heard_beep(obs)) (*heard_)[t_] = true;
    ++t_;
  }
  std::int64_t output() const override { return 0; }

 private:
  std::int64_t color_;
  std::size_t c_;
  const std::vector<bool>* mine_;
  std::vector<bool>* heard_;
  std::size_t t_ = 0;
};

class ColorsetRelayProtocol final : public BeepProtocol {
 public:
  ColorsetRelayProtocol(const ColorAssignment& coloring, const std::vector<std::vector<bool>>& mine,
                        std::vector<std::vector<bool>>& heard)
      : coloring_(coloring), mine_(mine), heard_(heard) {}
  std::string name() const override { return "colorset-phase2"; }
  Model model() const override { return Model::BL; }
  std::size_t length() const override { return coloring_.palette * coloring_.palette; }
  std::unique_ptr<BeepNode> make_node(NodeId id, std::uint64_t) const override {
    return std::make_unique<ColorsetRelay>(coloring_.color[id], coloring_.palette, &mine_[id], &heard_[id]);
  }

 private:
  const ColorAssignment& coloring_;
  const std::vector<std::vector<bool>>& mine_;
  std::vector<std::vector<bool>>& heard_;
};

std::uint64_t run_phase(const BeepProtocol& protocol, const Topology& topology, double epsilon, double budget,
                        std::uint64_t seed) {
  if (epsilon == 0.0) return run_direct(protocol, topology, seed).slots;
  return simulate_noisy(protocol, topology, epsilon, budget, seed).slots;
}

}  // namespace

std::vector<Colorset> preprocess_colorsets(const Topology& topology, const ColorAssignment& coloring, double epsilon,
                                           double failure_budget, std::uint64_t seed, std::uint64_t* slots_used) {
  std::uint64_t slots = 0;
  require_two_hop(topology, coloring);
  const std::size_t n = topology.node_count();
  const std::size_t c = coloring.palette;
  std::vector<std::vector<bool>> phase1(n, std::vector<bool>(c, false));
  slots += run_phase(ColorBeaconProtocol(coloring, phase1), topology, epsilon, failure_budget / 2,
                       derive_seed(seed, {1}));
  std::vector<std::vector<bool>> phase2(n, std::vector<bool>(c * c, false));
  slots += run_phase(ColorsetRelayProtocol(coloring, phase1, phase2), topology, epsilon, failure_budget / 2,
                       derive_seed(seed, {2}));
  if (slots_used) *slots_used = slots;

  std::vector<Colorset> sets(n);
  for (NodeId v = 0; v < n; ++v) {
    sets[v].own = coloring.color[v];
    for (std::size_t i = 0; i < c; ++i) {
      if (!phase1[v][i]) continue;
      sets[v].neighbor_colors.push_back(std::int64_t(i));
      std::vector<std::int64_t> theirs;
      for (std::size_t j = 0; j < c; ++j)
        if (phase2[v][i * c + j]) theirs.push_back(std::int64_t(j));
      sets[v].neighbor_colorsets.push_back(std::move(theirs));
    }
  }
  return sets;
}

ColorAssignment compact(const ColorAssignment& coloring) {
  std::vector<std::int64_t> used(coloring.color);
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  ColorAssignment out{coloring.color, used.size()};
  for (auto& c : out.color) c = std::lower_bound(used.begin(), used.end(), c) - used.begin();
  return out;
}

ColorAssignment identity_coloring(std::size_t n) {
  ColorAssignment out{std::vector<std::int64_t>(n), n};
  for (std::size_t v = 0; v < n; ++v) out.color[v] = std::int64_t(v);
  return out;
}

}  // namespace nbeep
