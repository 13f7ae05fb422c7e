#include "noisybeep/channel.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace nbeep {

std::string_view to_string(Model m) noexcept {
  switch (m) {
    case Model::BL: return "BL";
    case Model::BcdL: return "BcdL";
    case Model::BLcd: return "BLcd";
    case Model::BcdLcd: return "BcdLcd";
    case Model::BLeps: return "BLeps";
  }
  return "?";
}

std::string_view to_string(Action a) noexcept { return a == Action::Beep ? "beep" : "listen"; }

std::string_view to_string(Observation o) noexcept {
  switch (o) {
    case Observation::None: return "none";
    case Observation::Silence: return "silence";
    case Observation::Beep: return "beep";
    case Observation::One: return "one";
    case Observation::Many: return "many";
    case Observation::Alone: return "alone";
    case Observation::NotAlone: return "not_alone";
  }
  return "?";
}

Model parse_model(std::string_view s) {
  for (Model m : {Model::BL, Model::BcdL, Model::BLcd, Model::BcdLcd, Model::BLeps})
    if (to_string(m) == s) return m;
  throw std::invalid_argument("unknown model '" + std::string(s) + "'");
}

Channel::Channel(const Topology& topology, Model model, NoiseConfig noise)
    : topology_(&topology),
      model_(model),
      epsilon_(noise.epsilon),
      noise_rng_(derive_seed(noise.seed, {stream::kNoise})),
      flip_(model == Model::BLeps && noise.epsilon >= 0.0 && noise.epsilon < 0.5 ? noise.epsilon : 0.0),
      beeping_neighbors_(topology.node_count(), 0) {
  if (model != Model::BLeps && noise.epsilon != 0.0)
    throw std::invalid_argument(std::string("noise configured on noiseless model ") + std::string(to_string(model)));
  if (model == Model::BLeps && !(noise.epsilon >= 0.0 && noise.epsilon < 0.5))
    throw std::invalid_argument("BLeps requires epsilon in [0, 1/2)");
  touched_.reserve(topology.node_count());
}

void Channel::step(std::span<const Action> actions, std::span<Observation> out) {
  const std::size_t n = topology_->node_count();
  if (actions.size() != n || out.size() != n) throw std::invalid_argument("Channel::step: one action per node required");

  for (NodeId v : touched_) beeping_neighbors_[v] = 0;
  touched_.clear();
  std::size_t beepers = 0;
  for (NodeId b = 0; b < n; ++b) {
    if (actions[b] != Action::Beep) continue;
    ++beepers;
    for (NodeId v : topology_->neighbors(b)) {
      if (beeping_neighbors_[v]++ == 0) touched_.push_back(v);
    }
  }

  std::size_t max_closed = 0;
  if (beepers > 0) {
    max_closed = 1;
    for (NodeId v : touched_) {
      const std::size_t closed = beeping_neighbors_[v] + (actions[v] == Action::Beep ? 1 : 0);
      max_closed = std::max(max_closed, closed);
    }
  }
  last_max_closed_ = max_closed;
  max_closed_ = std::max(max_closed_, max_closed);

  const bool noisy = model_ == Model::BLeps && epsilon_ > 0.0;
  for (NodeId v = 0; v < n; ++v) {
    const std::uint32_t count = beeping_neighbors_[v];
    if (actions[v] == Action::Beep) {
      out[v] = beeper_cd(model_) ? (count > 0 ? Observation::NotAlone : Observation::Alone) : Observation::None;
      continue;
    }
    if (listener_cd(model_)) {
      out[v] = count == 0 ? Observation::Silence : (count == 1 ? Observation::One : Observation::Many);
      continue;
    }
    bool heard = count > 0;
    if (noisy && flip_(noise_rng_)) heard = !heard;
    out[v] = heard ? Observation::Beep : Observation::Silence;
  }
  ++slots_;
}

RunResult run_rounds(Channel& channel, std::span<const std::unique_ptr<NodeProgram>> programs,
                     std::uint64_t max_slots, bool record_transcripts) {
  const std::size_t n = channel.topology().node_count();
  if (programs.size() != n) throw std::invalid_argument("run_rounds: one program per node required");
  if (max_slots < 1) throw std::invalid_argument("run_rounds: max_slots must be >= 1");

  RunResult result;
  result.transcripts.resize(record_transcripts ? n : 0);
  std::vector<bool> done(n, false);
  std::vector<Action> actions(n, Action::Listen);
  std::vector<Observation> obs(n, Observation::None);
  std::size_t live = n;

  while (result.slots_used < max_slots) {
    for (NodeId v = 0; v < n; ++v) {
      if (done[v]) {
        actions[v] = Action::Listen;
        continue;
      }
      switch (programs[v]->next_action()) {
        case NodeAction::Terminate:
          done[v] = true;
          --live;
          actions[v] = Action::Listen;
          break;
        case NodeAction::Beep: actions[v] = Action::Beep; break;
        case NodeAction::Listen: actions[v] = Action::Listen; break;
      }
    }
    if (live == 0) break;
    channel.step(actions, obs);
    ++result.slots_used;
    for (NodeId v = 0; v < n; ++v) {
      if (done[v]) continue;
      programs[v]->absorb(obs[v]);
      if (record_transcripts) result.transcripts[v].push_back({actions[v], obs[v]});
    }
  }
  // Budget exhausted: a node whose very next decision is Terminate has finished.
  for (NodeId v = 0; v < n && live > 0; ++v) {
    if (done[v]) continue;
    if (programs[v]->next_action() != NodeAction::Terminate) result.unterminated.push_back(v);
  }
  return result;
}

}  // namespace nbeep
