#include "noisybeep/beep_sim.hpp"

#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace nbeep {

namespace {
constexpr std::uint64_t kCodewordStream = 0x63776f7264ULL;  // "cword"

std::vector<std::unique_ptr<BeepNode>> make_nodes(const BeepProtocol& protocol, std::size_t n, std::uint64_t seed) {
  std::vector<std::unique_ptr<BeepNode>> nodes;
  nodes.reserve(n);
  for (NodeId v = 0; v < n; ++v) nodes.push_back(protocol.make_node(v, node_seed(seed, v)));
  return nodes;
}
}  // namespace

std::uint64_t node_seed(std::uint64_t seed, NodeId v) { return derive_seed(seed, {stream::kNode, v}); }

ProtocolRun run_direct(const BeepProtocol& protocol, const Topology& topology, std::uint64_t seed, bool record) {
  if (protocol.model() == Model::BLeps) throw std::invalid_argument("run_direct: protocol must target a noiseless model");
  const std::size_t n = topology.node_count();
  auto nodes = make_nodes(protocol, n, seed);
  std::vector<std::unique_ptr<NodeProgram>> programs;
  programs.reserve(n);
  // run_rounds takes NodeProgram ownership views; keep BeepNode pointers for outputs.
  std::vector<BeepNode*> raw;
  for (auto& node : nodes) {
    raw.push_back(node.get());
    programs.emplace_back(std::move(node));
  }
  Channel channel(topology, protocol.model());
  const auto res = run_rounds(channel, programs, protocol.length(), record);

  ProtocolRun run;
  run.rounds = res.slots_used;
  run.slots = res.slots_used;
  run.n_c = 1;
  run.all_terminated = res.all_terminated();
  for (auto* node : raw) run.outputs.push_back(node->output());
  if (record) {
    for (NodeId v = 0; v < n; ++v)
      for (std::size_t r = 0; r < res.transcripts[v].size(); ++r)
        run.transcript.push_back({r, v, res.transcripts[v][r].action, std::nullopt, res.transcripts[v][r].observation});
  }
  return run;
}

MappedOutcome map_outcome(CDOutcome cd, bool was_active, Model model) {
  if (was_active) {
    const bool fault = cd == CDOutcome::Silence;
    if (!beeper_cd(model)) return {Observation::None, fault};
    return {cd == CDOutcome::Collision ? Observation::NotAlone : Observation::Alone, fault};
  }
  if (cd == CDOutcome::Silence) return {Observation::Silence, false};
  if (listener_cd(model)) return {cd == CDOutcome::SingleSender ? Observation::One : Observation::Many, false};
  return {Observation::Beep, false};
}

ProtocolRun simulate_noisy(const BeepProtocol& protocol, const Topology& topology, double epsilon,
                           double target_failure, std::uint64_t seed, const SimOptions& options) {
  const std::size_t rounds = options.rounds_bound.value_or(protocol.length());
  const auto params = choose_cd_params(topology.node_count(), rounds, epsilon, target_failure, options.delta);
  return simulate_noisy(protocol, topology, params, seed, options);
}

ProtocolRun simulate_noisy(const BeepProtocol& protocol, const Topology& topology, const CDParams& params,
                           std::uint64_t seed, const SimOptions& options) {
  const std::size_t n = topology.node_count();
  const std::size_t rounds = options.rounds_bound.value_or(protocol.length());
  auto nodes = make_nodes(protocol, n, seed);
  std::vector<Rng> codeword_rngs;
  codeword_rngs.reserve(n);
  for (NodeId v = 0; v < n; ++v) codeword_rngs.emplace_back(derive_seed(seed, {kCodewordStream, v}));

  Channel channel(topology, Model::BLeps, {params.epsilon, derive_seed(seed, {stream::kNoise})});
  CollisionDetector detector(params);
  std::vector<bool> done(n, false);
  std::vector<BitVec> codewords(n);
  std::vector<CDOutcome> outcomes(n);
  std::size_t live = n;

  ProtocolRun run;
  run.n_c = params.n_c();
  while (run.rounds < rounds) {
    for (NodeId v = 0; v < n; ++v) {
      codewords[v] = BitVec();
      if (done[v]) continue;
      switch (nodes[v]->next_action()) {
        case NodeAction::Terminate:
          done[v] = true;
          --live;
          break;
        case NodeAction::Beep: codewords[v] = sample_codeword(params.code, codeword_rngs[v]); break;
        case NodeAction::Listen: break;
      }
    }
    if (live == 0) break;
    detector.run(channel, codewords, outcomes);
    for (NodeId v = 0; v < n; ++v) {
      if (done[v]) continue;
      const bool active = !codewords[v].empty();
      const auto mapped = map_outcome(outcomes[v], active, protocol.model());
      if (mapped.fault) run.faults.push_back({run.rounds, v, "active node decoded silence"});
      nodes[v]->absorb(mapped.observation);
      if (options.record)
        run.transcript.push_back({run.rounds, v, active ? Action::Beep : Action::Listen, outcomes[v], mapped.observation});
    }
    ++run.rounds;
  }
  if (live > 0) {
    live = 0;
    for (NodeId v = 0; v < n; ++v)
      if (!done[v] && nodes[v]->next_action() != NodeAction::Terminate) ++live;
  }
  run.all_terminated = live == 0;
  run.slots = run.rounds * run.n_c;
  for (auto& node : nodes) run.outputs.push_back(node->output());
  return run;
}

void write_transcript_jsonl(std::ostream& out, const std::vector<RoundRecord>& transcript) {
  for (const auto& r : transcript) {
    nlohmann::json j;
    j["round"] = r.round;
    j["node"] = r.node;
    j["action"] = std::string(to_string(r.action));
    j["cd_outcome"] = r.cd ? nlohmann::json(std::string(to_string(*r.cd))) : nlohmann::json(nullptr);
    j["mapped_observation"] = std::string(to_string(r.observation));
    out << j.dump() << '\n';
  }
}

}  // namespace nbeep
