#include <bit>

#include "noisybeep/congest.hpp"

namespace nbeep {

// message exchange ------------------------------------------------------------

namespace {

class ExchangeNode final : public CongestNode {
 public:
  ExchangeNode(const MessageExchangeTask& task, NodeId self, std::span<const NodeId> peers, std::size_t k)
      : task_(task), self_(self), peers_(peers.begin(), peers.end()), k_(k), got_(peers.size() * k, 0) {}

  std::vector<Message> send(std::size_t t) override {
    std::vector<Message> out(peers_.size());
    for (std::size_t p = 0; p < peers_.size(); ++p)
      out[p] = peers_[p] == kUnknownPeer ? 0 : task_.bit(self_, peers_[p], t);
    return out;
  }
  void receive(std::size_t t, std::span<const Message> in) override {
    for (std::size_t p = 0; p < in.size() && p < peers_.size(); ++p) got_[p * k_ + t] = std::int64_t(in[p] & 1U);
  }
  std::vector<std::int64_t> output() const override { return got_; }

 private:
  const MessageExchangeTask& task_;
  NodeId self_;  // input lookup only
  std::vector<NodeId> peers_;
  std::size_t k_;
  std::vector<std::int64_t> got_;
};

class ExchangeProtocol final : public CongestProtocol {
 public:
  ExchangeProtocol(const MessageExchangeTask& task, std::size_t k) : task_(task), k_(k) {}
  std::string name() const override { return "message-exchange"; }
  std::size_t message_bits() const override { return 1; }
  std::size_t rounds() const override { return k_; }
  std::unique_ptr<CongestNode> make_node(NodeId id, std::span<const NodeId> peers) const override {
    return std::make_unique<ExchangeNode>(task_, id, peers, k_);
  }

 private:
  const MessageExchangeTask& task_;
  std::size_t k_;
};

}  // namespace

MessageExchangeTask::MessageExchangeTask(const Topology& topology, std::size_t k, std::uint64_t seed)
    : topology_(&topology), k_(k), seed_(seed) {
  if (topology.node_count() < 2 || k == 0) throw std::invalid_argument("message exchange needs n >= 2 and k >= 1");
  // The protocol reads inputs back from this task, which must outlive it.
  protocol_ = std::make_shared<ExchangeProtocol>(*this, k);
}

bool MessageExchangeTask::bit(NodeId u, NodeId v, std::size_t t) const {
  return derive_seed(seed_, {stream::kInput, u, v, t}) & 1U;
}

bool MessageExchangeTask::verify(const std::vector<std::vector<std::int64_t>>& outputs, const PortMap& ports) const {
  const std::size_t n = topology_->node_count();
  if (outputs.size() != n) return false;
  for (NodeId v = 0; v < n; ++v) {
    if (ports[v].size() != topology_->degree(v) || outputs[v].size() != ports[v].size() * k_) return false;
    for (std::size_t p = 0; p < ports[v].size(); ++p) {
      const NodeId u = ports[v][p];
      if (u == kUnknownPeer || !topology_->adjacent(u, v)) return false;
      for (std::size_t t = 0; t < k_; ++t)
        if (outputs[v][p * k_ + t] != std::int64_t(bit(u, v, t))) return false;
    }
  }
  return true;
}

// BFS layering ---------------------------------------------------------------

namespace {

class BfsNode final : public CongestNode {
 public:
  BfsNode(bool root, std::size_t ports, std::size_t B)
      : ports_(ports), unknown_((Message{1} << B) - 1), dist_(root ? 0 : unknown_) {}
  std::vector<Message> send(std::size_t) override { return std::vector<Message>(ports_, dist_); }
  void receive(std::size_t, std::span<const Message> in) override {
    for (Message d : in)
      if (d != unknown_ && d + 1 < dist_) dist_ = d + 1;
  }
  std::vector<std::int64_t> output() const override { return {dist_ == unknown_ ? -1 : std::int64_t(dist_)}; }

 private:
  std::size_t ports_;
  Message unknown_;
  Message dist_;
};

class BfsProtocol final : public CongestProtocol {
 public:
  BfsProtocol(std::size_t n, NodeId root) : n_(n), root_(root), B_(std::bit_width(n)) {}
  std::string name() const override { return "bfs-layering"; }
  std::size_t message_bits() const override { return B_; }
  std::size_t rounds() const override { return n_; }
  std::unique_ptr<CongestNode> make_node(NodeId id, std::span<const NodeId> peers) const override {
    return std::make_unique<BfsNode>(id == root_, peers.size(), B_);
  }

 private:
  std::size_t n_;
  NodeId root_;
  std::size_t B_;
};

class FloodNode final : public CongestNode {
 public:
  FloodNode(std::size_t ports, std::uint8_t token) : ports_(ports), token_(token) {}
  std::vector<Message> send(std::size_t) override { return std::vector<Message>(ports_, token_); }
  void receive(std::size_t, std::span<const Message> in) override {
    for (Message m : in)
      if (m != 0) token_ = std::uint8_t(m);
  }
  std::vector<std::int64_t> output() const override { return {token_ == 0 ? -1 : std::int64_t(token_)}; }

 private:
  std::size_t ports_;
  std::uint8_t token_;
};

class FloodProtocol final : public CongestProtocol {
 public:
  FloodProtocol(std::size_t n, std::uint8_t token, NodeId root) : n_(n), token_(token), root_(root) {}
  std::string name() const override { return "flooding"; }
  std::size_t message_bits() const override { return 8; }
  std::size_t rounds() const override { return n_; }
  std::unique_ptr<CongestNode> make_node(NodeId id, std::span<const NodeId> peers) const override {
    return std::make_unique<FloodNode>(peers.size(), id == root_ ? token_ : 0);
  }

 private:
  std::size_t n_;
  std::uint8_t token_;
  NodeId root_;
};

}  // namespace

std::shared_ptr<const CongestProtocol> bfs_layering_protocol(std::size_t n, NodeId root) {
  return std::make_shared<BfsProtocol>(n, root);
}

bool verify_bfs(const Topology& topology, const std::vector<std::vector<std::int64_t>>& outputs, NodeId root) {
  const auto dist = topology.distances_from(root);
  if (outputs.size() != topology.node_count()) return false;
  for (NodeId v = 0; v < topology.node_count(); ++v) {
    const std::int64_t want = dist[v] ? std::int64_t(*dist[v]) : -1;
    if (outputs[v] != std::vector<std::int64_t>{want}) return false;
  }
  return true;
}

std::shared_ptr<const CongestProtocol> flooding_protocol(std::size_t n, std::uint8_t token, NodeId root) {
  if (token == 0) throw std::invalid_argument("flooding token must be nonzero");
  return std::make_shared<FloodProtocol>(n, token, root);
}

bool verify_flooding(const Topology& topology, const std::vector<std::vector<std::int64_t>>& outputs,
                     std::uint8_t token, NodeId root) {
  const auto dist = topology.distances_from(root);
  if (outputs.size() != topology.node_count()) return false;
  for (NodeId v = 0; v < topology.node_count(); ++v) {
    const std::int64_t want = dist[v] ? std::int64_t(token) : -1;
    if (outputs[v] != std::vector<std::int64_t>{want}) return false;
  }
  return true;
}

}  // namespace nbeep
