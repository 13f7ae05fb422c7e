#include <algorithm>
#include <set>

#include "doctest.h"
#include "noisybeep/congest.hpp"

using namespace nbeep;

namespace {

// Every node sends a fresh pseudo-random B-bit value per port and round and
// records everything it receives.
class TraceNode : public CongestNode {
 public:
  TraceNode(NodeId id, std::size_t ports, std::size_t B, std::uint64_t seed)
      : id_(id), ports_(ports), B_(B), seed_(seed) {}
  std::vector<Message> send(std::size_t t) override {
    std::vector<Message> m(ports_);
    for (std::size_t p = 0; p < ports_; ++p) m[p] = value(id_, p, t, B_, seed_);
    return m;
  }
  void receive(std::size_t, std::span<const Message> in) override {
    for (auto x : in) got_.push_back(std::int64_t(x));
  }
  std::vector<std::int64_t> output() const override { return got_; }

  static Message value(NodeId id, std::size_t p, std::size_t t, std::size_t B, std::uint64_t seed) {
    const auto r = derive_seed(seed, {id, p, t});
    return B == 64 ? r : r & ((Message{1} << B) - 1);
  }

 private:
  NodeId id_;
  std::size_t ports_, B_;
  std::uint64_t seed_;
  std::vector<std::int64_t> got_;
};

class Trace : public CongestProtocol {
 public:
  Trace(std::size_t B, std::size_t rounds, std::uint64_t seed) : B_(B), rounds_(rounds), seed_(seed) {}
  std::string name() const override { return "trace"; }
  std::size_t message_bits() const override { return B_; }
  std::size_t rounds() const override { return rounds_; }
  std::unique_ptr<CongestNode> make_node(NodeId id, std::span<const NodeId> peers) const override {
    return std::make_unique<TraceNode>(id, peers.size(), B_, seed_);
  }

 private:
  std::size_t B_, rounds_;
  std::uint64_t seed_;
};

class Constant : public CongestProtocol {
 public:
  std::string name() const override { return "constant"; }
  std::size_t message_bits() const override { return 4; }
  std::size_t rounds() const override { return 1; }
  std::unique_ptr<CongestNode> make_node(NodeId, std::span<const NodeId> peers) const override {
    struct N : CongestNode {
      std::size_t ports;
      explicit N(std::size_t p) : ports(p) {}
      std::vector<Message> send(std::size_t) override { return std::vector<Message>(ports, 0b1011); }
      void receive(std::size_t, std::span<const Message>) override {}
      std::vector<std::int64_t> output() const override { return {}; }
    };
    return std::make_unique<N>(peers.size());
  }
};

std::set<std::int64_t> as_set(const std::vector<std::int64_t>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_CASE("bit expansion") {
  auto pi = std::make_shared<const Constant>();
  auto expanded = bit_expand(pi);
  CHECK(expanded->message_bits() == 1);
  CHECK(expanded->rounds() == 4);
  const NodeId peer[1] = {1};
  auto node = expanded->make_node(0, peer);
  std::vector<Message> emitted;
  for (std::size_t t = 0; t < 4; ++t) {
    const auto m = node->send(t);
    REQUIRE(m.size() == 1);
    emitted.push_back(m[0]);
    const Message echo[1] = {m[0]};
    node->receive(t, echo);
  }
  CHECK(emitted == std::vector<Message>{1, 0, 1, 1});

  auto one_bit = std::make_shared<const Trace>(1, 3, 0);
  CHECK(bit_expand(one_bit) == one_bit);
}

TEST_CASE("bit expansion round-trips random traces") {
  const auto t = Topology::gnp(10, 0.4, 1);
  const auto ports = ports_by_id(t);
  for (std::size_t B : {2u, 7u, 64u})
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto pi = std::make_shared<const Trace>(B, 5, seed);
      const auto direct = run_congest_direct(*pi, t, ports);
      const auto expanded = run_congest_direct(*bit_expand(pi), t, ports);
      CHECK(expanded.rounds == 5 * B);
      CHECK(expanded.outputs == direct.outputs);
      const auto rep = run_congest_direct(*apply_robust(bit_expand(pi), RobustLayer::repetition(3)), t, ports);
      CHECK(rep.rounds == 15 * B);
      CHECK(rep.outputs == direct.outputs);
    }
}

TEST_CASE("robust layer names") {
  CHECK(RobustLayer::parse("identity").kind == RobustLayer::Kind::Identity);
  const auto r = RobustLayer::parse("repetition:5");
  CHECK(r.kind == RobustLayer::Kind::Repetition);
  CHECK(r.k == 5);
  CHECK(RobustLayer::parse(r.name()).k == 5);
  CHECK_THROWS(RobustLayer::parse("repetition:0"));
  CHECK_THROWS(RobustLayer::parse("tree"));
  auto pi = std::make_shared<const Trace>(1, 3, 0);
  CHECK(apply_robust(pi, RobustLayer::identity()) == pi);
  CHECK_THROWS(apply_robust(std::make_shared<const Trace>(2, 3, 0), RobustLayer::repetition(3)));
}

TEST_CASE("direct execution enforces message width") {
  class Wide : public Trace {
   public:
    Wide() : Trace(3, 1, 0) {}
    std::unique_ptr<CongestNode> make_node(NodeId, std::span<const NodeId> peers) const override {
      struct N : TraceNode {
        explicit N(std::size_t p) : TraceNode(0, p, 3, 0) {}
        std::vector<Message> send(std::size_t) override { return std::vector<Message>(1, 8); }
      };
      return std::make_unique<N>(peers.size());
    }
  };
  const auto t = Topology::clique(2);
  CHECK_THROWS(run_congest_direct(Wide(), t, ports_by_id(t)));
}

TEST_CASE("colorset preprocessing") {
  const auto p3 = Topology::path(3);
  const ColorAssignment c3{{1, 2, 3}, 4};
  const auto cs = preprocess_colorsets(p3, c3, 0.0, 1e-2, 1);
  CHECK(cs == true_colorsets(p3, c3));
  CHECK(cs[1].neighbor_colors == std::vector<std::int64_t>{1, 3});
  CHECK(cs[0].neighbor_colors == std::vector<std::int64_t>{2});
  CHECK(cs[0].neighbor_colorsets[0] == std::vector<std::int64_t>{1, 3});
  CHECK(cs[2].neighbor_colorsets[0] == std::vector<std::int64_t>{1, 3});

  const auto k4 = Topology::clique(4);
  const auto kc = preprocess_colorsets(k4, identity_coloring(4), 0.0, 1e-2, 1);
  for (NodeId v = 0; v < 4; ++v) {
    std::vector<std::int64_t> others;
    for (std::int64_t c = 0; c < 4; ++c)
      if (c != std::int64_t(v)) others.push_back(c);
    CHECK(kc[v].own == std::int64_t(v));
    CHECK(kc[v].neighbor_colors == others);
  }

  CHECK_THROWS_AS(preprocess_colorsets(p3, ColorAssignment{{0, 1, 0}, 2}, 0.0, 1e-2, 1), std::invalid_argument);
  CHECK_THROWS_AS(require_two_hop(k4, ColorAssignment{{0, 1, 2, 2}, 3}), std::invalid_argument);
}

TEST_CASE("noisy preprocessing matches the noiseless result") {
  const auto t = Topology::gnp(12, 0.3, 4);
  const auto coloring = compact(two_hop_coloring(t, 2));
  const auto truth = true_colorsets(t, coloring);
  int equal = 0;
  const int trials = 200;
  std::uint64_t slots = 0, clean = 0;
  preprocess_colorsets(t, coloring, 0.0, 1e-2, 0, &clean);
  CHECK(clean == coloring.palette + coloring.palette * coloring.palette);
  for (int s = 0; s < trials; ++s) equal += preprocess_colorsets(t, coloring, 0.05, 1e-2, std::uint64_t(s), &slots) == truth;
  CHECK(slots > clean);
  CHECK(equal >= trials - 3);
}

TEST_CASE("compact and identity colorings") {
  const auto c = compact(ColorAssignment{{7, 3, 7, 11}, 12});
  CHECK(c.color == std::vector<std::int64_t>{1, 0, 1, 2});
  CHECK(c.palette == 3);
  CHECK(identity_coloring(3).color == std::vector<std::int64_t>{0, 1, 2});
}

TEST_CASE("receiver extracts its block by color rank") {
  // center 0 has neighbors colored 2, 5, 9; the color-5 leaf reads block 2 of 3
  const auto star = Topology::star(4);
  const ColorAssignment coloring{{0, 2, 5, 9}, 10};
  const auto cs = true_colorsets(star, coloring);
  CHECK(cs[0].neighbor_colors == std::vector<std::int64_t>{2, 5, 9});
  const MessageExchangeTask task(star, 3, 8);
  const auto res = tdma_simulate(task.protocol(), star, coloring, RobustLayer::identity(), 0.0, 8);
  CHECK(task.verify(res.outputs, res.ports));
  for (std::size_t t = 0; t < 3; ++t) CHECK(res.outputs[2][t] == std::int64_t(task.bit(0, 2, t)));
  CHECK(res.ports[0] == std::vector<NodeId>{1, 2, 3});
}

TEST_CASE("noiseless TDMA equals direct execution") {
  const auto k8 = Topology::clique(8);
  const auto g = Topology::gnp(16, 0.3, 5);
  const auto gcol = compact(two_hop_coloring(g, 3));
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const MessageExchangeTask task(k8, 4, seed);
    const auto res = tdma_simulate(task.protocol(), k8, identity_coloring(8), RobustLayer::identity(), 0.0, seed);
    CHECK(res.collision_free());
    CHECK(res.colorsets_correct);
    CHECK(res.outputs == run_congest_direct(*task.protocol(), k8, res.ports).outputs);
    CHECK(task.verify(res.outputs, res.ports));

    const auto bfs = bfs_layering_protocol(16);
    const auto b = tdma_simulate(bfs, g, gcol, RobustLayer::identity(), 0.0, seed);
    CHECK(b.collision_free());
    CHECK(b.outputs == run_congest_direct(*bfs, g, b.ports).outputs);
    CHECK(verify_bfs(g, b.outputs));

    const auto flood = flooding_protocol(16, 0xA5, 3);
    const auto f = tdma_simulate(flood, g, gcol, RobustLayer::repetition(3), 0.0, seed);
    CHECK(verify_flooding(g, f.outputs, 0xA5, 3));
  }
}

TEST_CASE("message exchange with two parties") {
  const auto t = Topology::clique(2);
  const MessageExchangeTask task(t, 1, 5);
  const auto ports = ports_by_id(t);
  const auto run = run_congest_direct(*task.protocol(), t, ports);
  CHECK(run.outputs[0] == std::vector<std::int64_t>{task.bit(1, 0, 0)});
  CHECK(run.outputs[1] == std::vector<std::int64_t>{task.bit(0, 1, 0)});
  auto wrong = run.outputs;
  wrong[0][0] ^= 1;
  CHECK_FALSE(task.verify(wrong, ports));
}

TEST_CASE("slot accounting and quadratic overhead on cliques") {
  std::uint64_t prev = 0;
  for (std::size_t n : {4u, 8u, 16u, 32u}) {
    const auto t = Topology::clique(n);
    const MessageExchangeTask task(t, 2, 1);
    const auto res = tdma_simulate(task.protocol(), t, identity_coloring(n), RobustLayer::identity(), 0.0, 1);
    CHECK(res.Pi_rounds == 2);
    CHECK(res.colors == n);
    CHECK(res.k_C >= n - 1);
    CHECK(res.n_C == 4 * res.k_C);
    CHECK(res.slots == std::uint64_t(res.Pi_rounds) * res.colors * res.n_C);
    if (prev) {
      const double ratio = double(res.slots) / double(prev);
      CHECK(ratio >= 3.5);
      CHECK(ratio <= 4.5);
    }
    prev = res.slots;
  }
}

TEST_CASE("neighborhood code") {
  const auto c = neighborhood_code(7, 4);
  CHECK(c.message_bits() == 8);
  CHECK(c.block_length() == 32);
  CHECK(c.relative_distance() >= 0.1);
  CHECK(neighborhood_code(0, 4).message_bits() == 1);
  CHECK(neighborhood_code(16, 4).block_length() == 64);
}

TEST_CASE("block failures shrink with block length") {
  std::vector<double> rate;
  for (std::size_t d : {4u, 8u, 16u}) rate.push_back(measure_block_failures(neighborhood_code(d, 4), 0.05, 20000, 2).rate());
  CHECK(rate[0] > 0);
  CHECK(rate[1] <= rate[0] / 2);
  CHECK(rate[2] <= rate[1] / 2);
  CHECK(measure_block_failures(neighborhood_code(4, 4), 0.0, 1000, 2).failures == 0);
}

TEST_CASE("repetition outvotes noise") {
  const auto t = Topology::clique(6);
  int id_ok = 0, rep_ok = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const MessageExchangeTask task(t, 4, seed);
    id_ok += task.verify(tdma_simulate(task.protocol(), t, identity_coloring(6), RobustLayer::identity(), 0.05, seed).outputs,
                         ports_by_id(t));
    const auto r = tdma_simulate(task.protocol(), t, identity_coloring(6), RobustLayer::repetition(5), 0.05, seed);
    rep_ok += task.verify(r.outputs, r.ports);
  }
  CHECK(rep_ok >= id_ok);
  CHECK(rep_ok >= 18);
}
