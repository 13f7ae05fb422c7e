#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "noisybeep/apps.hpp"
#include "noisybeep/beep_sim.hpp"

using namespace nbeep;

namespace {

// Beeps on random bits for L rounds and folds every observation into its output.
class EchoNode : public BeepNode {
 public:
  EchoNode(std::size_t rounds, std::uint64_t seed, std::set<Observation>* seen)
      : rounds_(rounds), rng_(seed), seen_(seen) {}
  NodeAction next_action() override {
    if (round_ == rounds_) return NodeAction::Terminate;
    return (rng_() & 1) ? NodeAction::Beep : NodeAction::Listen;
  }
  void absorb(Observation o) override {
    ++round_;
    digest_ = digest_ * 7 + std::int64_t(o) + 1;
    if (seen_) seen_->insert(o);
  }
  std::int64_t output() const override { return digest_ & 0x7fffffffffff; }

 private:
  std::size_t rounds_, round_ = 0;
  Rng rng_;
  std::set<Observation>* seen_;
  std::int64_t digest_ = 0;
};

class Echo : public BeepProtocol {
 public:
  Echo(Model m, std::size_t rounds, std::set<Observation>* seen = nullptr) : m_(m), rounds_(rounds), seen_(seen) {}
  std::string name() const override { return "echo"; }
  Model model() const override { return m_; }
  std::size_t length() const override { return rounds_; }
  std::unique_ptr<BeepNode> make_node(NodeId, std::uint64_t seed) const override {
    return std::make_unique<EchoNode>(rounds_, seed, seen_);
  }

 private:
  Model m_;
  std::size_t rounds_;
  std::set<Observation>* seen_;
};

}  // namespace

TEST_CASE("outcome mapping table") {
  using O = Observation;
  struct Row {
    CDOutcome cd;
    bool active;
    Model m;
    O expect;
    bool fault;
  };
  const Row rows[] = {
      {CDOutcome::Collision, true, Model::BcdL, O::NotAlone, false},
      {CDOutcome::SingleSender, true, Model::BcdL, O::Alone, false},
      {CDOutcome::Collision, true, Model::BcdLcd, O::NotAlone, false},
      {CDOutcome::SingleSender, true, Model::BcdLcd, O::Alone, false},
      {CDOutcome::Collision, true, Model::BL, O::None, false},
      {CDOutcome::SingleSender, true, Model::BLcd, O::None, false},
      {CDOutcome::Silence, true, Model::BcdLcd, O::Alone, true},
      {CDOutcome::Silence, true, Model::BL, O::None, true},
      {CDOutcome::Silence, false, Model::BL, O::Silence, false},
      {CDOutcome::SingleSender, false, Model::BL, O::Beep, false},
      {CDOutcome::Collision, false, Model::BL, O::Beep, false},
      {CDOutcome::Collision, false, Model::BcdL, O::Beep, false},
      {CDOutcome::SingleSender, false, Model::BLcd, O::One, false},
      {CDOutcome::Collision, false, Model::BLcd, O::Many, false},
      {CDOutcome::SingleSender, false, Model::BcdLcd, O::One, false},
      {CDOutcome::Silence, false, Model::BcdLcd, O::Silence, false},
  };
  for (const auto& r : rows) {
    const auto got = map_outcome(r.cd, r.active, r.m);
    CHECK(got.fault == r.fault);
    if (!r.fault) CHECK(got.observation == r.expect);
  }
}

TEST_CASE("noiseless simulation equals direct execution on every model") {
  const Topology tops[] = {Topology::clique(6), Topology::star(7), Topology::gnp(12, 0.3, 2)};
  for (Model m : {Model::BL, Model::BcdL, Model::BLcd, Model::BcdLcd}) {
    const Echo p(m, 9);
    for (const auto& t : tops)
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto direct = run_direct(p, t, seed);
        const auto sim = simulate_noisy(p, t, 0.0, 1e-3, seed);
        CHECK(sim.outputs == direct.outputs);
        CHECK(sim.rounds == direct.rounds);
        CHECK(sim.faults.empty());
        CHECK(sim.all_terminated);
      }
  }
}

TEST_CASE("noiseless simulation equals direct execution with recorded transcripts") {
  const Echo p(Model::BcdLcd, 6);
  const auto t = Topology::wheel(8);
  SimOptions opt;
  opt.record = true;
  const auto direct = run_direct(p, t, 3, true);
  const auto sim = simulate_noisy(p, t, 0.0, 1e-2, 3, opt);
  REQUIRE(direct.transcript.size() == sim.transcript.size());
  // direct records are node-major, simulated ones round-major
  std::map<std::pair<std::uint64_t, NodeId>, RoundRecord> by_key;
  for (const auto& r : sim.transcript) by_key[{r.round, r.node}] = r;
  for (const auto& r : direct.transcript) {
    const auto& s = by_key.at({r.round, r.node});
    CHECK(s.action == r.action);
    CHECK(s.observation == r.observation);
    CHECK(s.cd.has_value());
    CHECK_FALSE(r.cd.has_value());
  }
}

TEST_CASE("model containment") {
  for (Model m : {Model::BL, Model::BLcd, Model::BcdL}) {
    std::set<Observation> seen;
    const Echo p(m, 20, &seen);
    simulate_noisy(p, Topology::clique(8), 0.05, 1e-2, 11);
    for (auto o : seen) {
      if (!listener_cd(m)) CHECK((o != Observation::One && o != Observation::Many));
      if (!beeper_cd(m)) CHECK((o != Observation::Alone && o != Observation::NotAlone));
      if (beeper_cd(m)) CHECK(o != Observation::None);
    }
    CHECK_FALSE(seen.empty());
  }
}

TEST_CASE("slot accounting") {
  const Echo p(Model::BcdLcd, 13);
  const auto t = Topology::clique(64);
  const auto sim = simulate_noisy(p, t, 0.0, 1e-3, 1);
  const auto params = choose_cd_params(64, 13, 0.0, 1e-3);
  CHECK(sim.n_c == params.n_c());
  CHECK(sim.rounds == 13);
  CHECK(sim.slots == 13 * params.n_c());

  SimOptions opt;
  opt.rounds_bound = 100;
  const auto longer = simulate_noisy(p, t, 0.05, 1e-3, 1, opt);
  CHECK(longer.n_c == choose_cd_params(64, 100, 0.05, 1e-3).n_c());
  CHECK(longer.slots == longer.rounds * longer.n_c);
  CHECK(longer.rounds == 13);
}

TEST_CASE("transcripts are JSON lines") {
  const Echo p(Model::BLcd, 3);
  SimOptions opt;
  opt.record = true;
  const auto sim = simulate_noisy(p, Topology::path(4), 0.0, 1e-2, 5, opt);
  std::ostringstream out;
  write_transcript_jsonl(out, sim.transcript);
  std::istringstream in(out.str());
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.contains("round"));
    CHECK(j.contains("node"));
    CHECK(j.contains("action"));
    CHECK(j["cd_outcome"].is_string());
    CHECK(j["mapped_observation"].is_string());
    ++lines;
  }
  CHECK(lines == 12);

  const auto direct = run_direct(p, Topology::path(4), 5, true);
  std::ostringstream d;
  write_transcript_jsonl(d, direct.transcript);
  CHECK(nlohmann::json::parse(d.str().substr(0, d.str().find('\n')))["cd_outcome"].is_null());
}

TEST_CASE("run_direct rejects the noisy model") {
  const Echo p(Model::BLeps, 2);
  CHECK_THROWS(run_direct(p, Topology::clique(2), 0));
}

TEST_CASE("end-to-end failure stays within the budget") {
  const auto t = Topology::clique(8);
  const Echo p(Model::BcdLcd, 10);
  const double target = 0.05;
  const int trials = 1000;
  int failures = 0;
  for (int s = 0; s < trials; ++s) {
    const auto seed = derive_seed(77, {std::uint64_t(s)});
    failures += simulate_noisy(p, t, 0.05, target, seed).outputs != run_direct(p, t, seed).outputs;
  }
  const double rate = failures / double(trials);
  const double se = std::sqrt(target * (1 - target) / trials);
  CHECK(rate <= target + 3 * se);
}
