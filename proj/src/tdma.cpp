#include <algorithm>
#include <bit>
#include <stdexcept>

#include "noisybeep/congest.hpp"

namespace nbeep {

BlockCode neighborhood_code(std::size_t max_degree, std::size_t rate_inverse) {
  if (rate_inverse == 0) throw std::invalid_argument("neighborhood_code: rate_inverse must be positive");
  const std::size_t k = std::bit_ceil(std::max<std::size_t>(1, max_degree));
  const std::size_t n = rate_inverse * k;
  for (int twentieths = 9; twentieths >= 2; --twentieths) {
    if (auto code = try_build_block_code_with_length(k, twentieths / 20.0, n)) return *code;
  }
  throw std::runtime_error("neighborhood_code: no code of length " + std::to_string(n));
}

BlockFailureStats measure_block_failures(const BlockCode& code, double epsilon, std::size_t decodes,
                                         std::uint64_t seed) {
  // One sender, one listener: the listener's view is the codeword through the
  // receiver noise of BLeps.
  const Topology pair = Topology::clique(2);
  Channel channel(pair, Model::BLeps, {epsilon, derive_seed(seed, {stream::kNoise})});
  Rng rng(derive_seed(seed, {stream::kInput}));
  const std::size_t n = code.block_length();
  Action actions[2] = {Action::Listen, Action::Listen};
  Observation obs[2];
  BitVec heard(n);
  BlockFailureStats stats;
  for (std::size_t i = 0; i < decodes; ++i) {
    const BitVec message = random_bits(code.message_bits(), rng);
    const BitVec word = code.encode(message);
    for (std::size_t s = 0; s < n; ++s) {
      actions[0] = word.get(s) ? Action::Beep : Action::Listen;
      channel.step(actions, obs);
      heard.set(s, heard_beep(obs[1]));
    }
    const auto decoded = code.decode(heard);
    ++stats.decodes;
    if (!decoded || *decoded != message) ++stats.failures;
  }
  return stats;
}

TdmaResult tdma_simulate(std::shared_ptr<const CongestProtocol> pi, const Topology& topology,
                         const ColorAssignment& coloring, const RobustLayer& robust, double epsilon,
                         std::uint64_t seed, const TdmaOptions& options) {
  const std::size_t n = topology.node_count();
  TdmaResult res;
  res.pi_rounds = pi->rounds();
  res.colors = coloring.palette;

  const auto sets = preprocess_colorsets(topology, coloring, epsilon, options.target_failure / 10,
                                         derive_seed(seed, {stream::kCode}), &res.preprocessing_slots);
  res.colorsets_correct = sets == true_colorsets(topology, coloring);

  const auto Pi = apply_robust(bit_expand(pi), robust);
  res.Pi_rounds = Pi->rounds();

  // The harness resolves each learned port color to the actual neighbor so
  // that inputs and outputs can be checked; nodes only see port indices.
  res.ports.resize(n);
  for (NodeId v = 0; v < n; ++v) {
    for (auto c : sets[v].neighbor_colors) {
      NodeId peer = kUnknownPeer;
      for (NodeId u : topology.neighbors(v))
        if (coloring.color[u] == c) peer = u;
      res.ports[v].push_back(peer);
    }
  }
  std::vector<std::unique_ptr<CongestNode>> nodes;
  for (NodeId v = 0; v < n; ++v) nodes.push_back(Pi->make_node(v, res.ports[v]));

  const BlockCode code = neighborhood_code(topology.max_degree(), options.rate_inverse);
  res.k_C = code.message_bits();
  res.n_C = code.block_length();

  // Position of my color inside each neighbor's colorset, per port.
  std::vector<std::vector<std::optional<std::size_t>>> slot_in_sender(n);
  for (NodeId v = 0; v < n; ++v) {
    for (const auto& theirs : sets[v].neighbor_colorsets) {
      const auto it = std::find(theirs.begin(), theirs.end(), sets[v].own);
      slot_in_sender[v].push_back(it == theirs.end() ? std::nullopt : std::optional<std::size_t>(it - theirs.begin()));
    }
  }
  // Port of the color-i neighbor, per node.
  std::vector<std::vector<std::optional<std::size_t>>> port_of_color(n, std::vector<std::optional<std::size_t>>(res.colors));
  for (NodeId v = 0; v < n; ++v)
    for (std::size_t q = 0; q < sets[v].neighbor_colors.size(); ++q) {
      const auto c = sets[v].neighbor_colors[q];
      if (c >= 0 && std::size_t(c) < res.colors) port_of_color[v][c] = q;
    }
  std::vector<std::vector<NodeId>> by_color(res.colors);
  for (NodeId v = 0; v < n; ++v) by_color[coloring.color[v]].push_back(v);

  Channel channel(topology, Model::BLeps, {epsilon, derive_seed(seed, {stream::kNoise})});
  std::vector<Action> actions(n, Action::Listen);
  std::vector<Observation> obs(n);
  std::vector<BitVec> heard(n, BitVec(res.n_C));
  std::vector<std::vector<Message>> outbox(n);
  std::vector<std::vector<Message>> inbox(n);
  std::vector<BitVec> sent(n);

  for (std::size_t t = 0; t < res.Pi_rounds; ++t) {
    for (NodeId v = 0; v < n; ++v) {
      outbox[v] = nodes[v]->send(t);
      inbox[v].assign(res.ports[v].size(), 0);
      BitVec block(res.k_C);
      for (std::size_t p = 0; p < outbox[v].size() && p < res.k_C; ++p) block.set(p, outbox[v][p] & 1U);
      sent[v] = std::move(block);
    }
    for (std::size_t i = 0; i < res.colors; ++i) {
      std::vector<BitVec> words;
      for (NodeId u : by_color[i]) words.push_back(code.encode(sent[u]));
      for (std::size_t s = 0; s < res.n_C; ++s) {
        for (std::size_t j = 0; j < by_color[i].size(); ++j)
          actions[by_color[i][j]] = words[j].get(s) ? Action::Beep : Action::Listen;
        channel.step(actions, obs);
        for (NodeId v = 0; v < n; ++v)
          if (port_of_color[v][i]) heard[v].set(s, heard_beep(obs[v]));
      }
      for (NodeId u : by_color[i]) actions[u] = Action::Listen;
      for (NodeId v = 0; v < n; ++v) {
        const auto q = port_of_color[v][i];
        if (!q) continue;
        const auto decoded = code.decode(heard[v]);
        ++res.messages;
        const NodeId sender = res.ports[v][*q];
        if (!decoded || sender == kUnknownPeer || *decoded != sent[sender]) ++res.decode_failures;
        const auto pos = slot_in_sender[v][*q];
        if (decoded && pos && *pos < res.k_C) inbox[v][*q] = decoded->get(*pos);
      }
    }
    for (NodeId v = 0; v < n; ++v) nodes[v]->receive(t, inbox[v]);
  }
  res.slots = channel.slots();
  res.max_closed_beepers = channel.max_closed_beepers();
  for (auto& node : nodes) res.outputs.push_back(node->output());
  return res;
}

}  // namespace nbeep
