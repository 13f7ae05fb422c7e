#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"
#include "noisybeep/channel.hpp"

using namespace nbeep;

namespace {

// Plays a fixed action list, then terminates (or keeps listening if `forever`).
class Scripted final : public NodeProgram {
 public:
  explicit Scripted(std::vector<NodeAction> script, bool forever = false)
      : script_(std::move(script)), forever_(forever) {}
  NodeAction next_action() override {
    if (i_ < script_.size()) return script_[i_];
    return forever_ ? NodeAction::Listen : NodeAction::Terminate;
  }
  void absorb(Observation) override { ++i_; }

 private:
  std::vector<NodeAction> script_;
  bool forever_;
  std::size_t i_ = 0;
};

std::vector<Observation> one_slot(Channel& ch, const std::vector<Action>& actions) {
  std::vector<Observation> obs(actions.size());
  ch.step(actions, obs);
  return obs;
}

}  // namespace

TEST_CASE("construction rejects noise on noiseless variants") {
  const auto t = Topology::clique(3);
  CHECK_THROWS_AS(Channel(t, Model::BL, {0.1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(Channel(t, Model::BcdLcd, {0.1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(Channel(t, Model::BLeps, {0.5, 1}), std::invalid_argument);
  CHECK_THROWS_AS(Channel(t, Model::BLeps, {-0.1, 1}), std::invalid_argument);
  CHECK_NOTHROW(Channel(t, Model::BLeps, {0.0, 1}));
}

TEST_CASE("star: OR semantics at the center") {
  const auto t = Topology::star(6);
  Channel ch(t, Model::BL);
  std::vector<Action> a(6, Action::Listen);
  CHECK(one_slot(ch, a)[0] == Observation::Silence);
  a[3] = Action::Beep;
  const auto obs = one_slot(ch, a);
  CHECK(obs[0] == Observation::Beep);
  CHECK(obs[1] == Observation::Silence);  // leaves only see the center
  CHECK(obs[3] == Observation::None);     // a BL beeper learns nothing
}

TEST_CASE("collision-detection variants") {
  const auto t = Topology::star(4);
  std::vector<Action> a(4, Action::Listen);
  a[1] = Action::Beep;
  {
    Channel ch(t, Model::BLcd);
    CHECK(one_slot(ch, a)[0] == Observation::One);
    a[2] = Action::Beep;
    CHECK(one_slot(ch, a)[0] == Observation::Many);
    CHECK(one_slot(ch, a)[1] == Observation::None);
  }
  {
    a.assign(4, Action::Listen);
    a[0] = Action::Beep;
    a[1] = Action::Beep;
    Channel ch(t, Model::BcdL);
    const auto obs = one_slot(ch, a);
    CHECK(obs[0] == Observation::NotAlone);
    CHECK(obs[1] == Observation::NotAlone);
    CHECK(obs[2] == Observation::Beep);
    a[1] = Action::Listen;
    CHECK(one_slot(ch, a)[0] == Observation::Alone);
  }
}

TEST_CASE("adding a second beeper never changes a noiseless BL observation") {
  const auto t = Topology::gnp(24, 0.3, 5);
  Channel ch(t, Model::BL);
  Rng rng(11);
  for (int round = 0; round < 200; ++round) {
    std::vector<Action> a(24);
    for (auto& x : a) x = rng() % 4 == 0 ? Action::Beep : Action::Listen;
    const auto before = one_slot(ch, a);
    for (NodeId v = 0; v < 24; ++v) {
      if (a[v] != Action::Listen || before[v] != Observation::Beep) continue;
      // another neighbor of v starts beeping
      for (NodeId u : t.neighbors(v)) {
        if (a[u] == Action::Beep) continue;
        auto b = a;
        b[u] = Action::Beep;
        CHECK(one_slot(ch, b)[v] == Observation::Beep);
        break;
      }
    }
  }
}

TEST_CASE("receiver noise has marginal epsilon regardless of neighborhood size") {
  const double eps = 0.1;
  const int N = 100000;
  for (std::size_t leaves : {2u, 16u}) {
    const auto t = Topology::star(leaves + 1);
    Channel ch(t, Model::BLeps, {eps, 77 + leaves});
    std::vector<Action> a(leaves + 1, Action::Listen);
    std::vector<Observation> obs(leaves + 1);
    int beeps = 0;
    for (int s = 0; s < N; ++s) {
      ch.step(a, obs);
      beeps += obs[0] == Observation::Beep;
    }
    const double se = std::sqrt(eps * (1 - eps) / N);
    CHECK(std::abs(double(beeps) / N - eps) <= 3 * se);
  }
}

TEST_CASE("noise is independent across listeners") {
  const double eps = 0.2;
  const int N = 50000;
  const auto t = Topology::path(3);
  Channel ch(t, Model::BLeps, {eps, 3});
  std::vector<Action> a(3, Action::Listen);
  std::vector<Observation> obs(3);
  double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
  for (int s = 0; s < N; ++s) {
    ch.step(a, obs);
    const double x = obs[0] == Observation::Beep, y = obs[2] == Observation::Beep;
    sx += x, sy += y, sxy += x * y, sxx += x * x, syy += y * y;
  }
  const double cov = sxy / N - (sx / N) * (sy / N);
  const double r = cov / std::sqrt((sxx / N - (sx / N) * (sx / N)) * (syy / N - (sy / N) * (sy / N)));
  CHECK(std::abs(r) < 3.0 / std::sqrt(double(N)));
}

TEST_CASE("BLeps beepers observe nothing") {
  const auto t = Topology::clique(2);
  Channel ch(t, Model::BLeps, {0.3, 1});
  for (int s = 0; s < 50; ++s) CHECK(one_slot(ch, {Action::Beep, Action::Beep})[0] == Observation::None);
}

TEST_CASE("run_rounds: all-listen for 5 slots") {
  const auto t = Topology::clique(4);
  Channel ch(t, Model::BL);
  std::vector<std::unique_ptr<NodeProgram>> p;
  for (int v = 0; v < 4; ++v) p.push_back(std::make_unique<Scripted>(std::vector<NodeAction>{}, true));
  const auto res = run_rounds(ch, p, 5);
  CHECK(res.slots_used == 5);
  CHECK(res.unterminated.size() == 4);
  for (const auto& tr : res.transcripts) {
    REQUIRE(tr.size() == 5);
    for (const auto& rec : tr) CHECK(rec.observation == Observation::Silence);
  }
}

TEST_CASE("run_rounds: one beep then termination") {
  const auto t = Topology::clique(5);
  Channel ch(t, Model::BL);
  std::vector<std::unique_ptr<NodeProgram>> p;
  p.push_back(std::make_unique<Scripted>(std::vector<NodeAction>{NodeAction::Beep}));
  for (int v = 1; v < 5; ++v)
    p.push_back(std::make_unique<Scripted>(std::vector<NodeAction>{NodeAction::Listen, NodeAction::Listen}));
  const auto res = run_rounds(ch, p, 10);
  CHECK(res.all_terminated());
  CHECK(res.slots_used == 2);
  CHECK(res.transcripts[0].size() == 1);
  for (NodeId v = 1; v < 5; ++v) {
    CHECK(res.transcripts[v][0].observation == Observation::Beep);
    CHECK(res.transcripts[v][1].observation == Observation::Silence);
  }
}

TEST_CASE("run_rounds is deterministic under a fixed noise seed") {
  const auto t = Topology::gnp(16, 0.3, 2);
  auto run = [&] {
    Channel ch(t, Model::BLeps, {0.1, 99});
    std::vector<std::unique_ptr<NodeProgram>> p;
    Rng rng(5);
    for (int v = 0; v < 16; ++v) {
      std::vector<NodeAction> script(30);
      for (auto& s : script) s = rng() % 3 == 0 ? NodeAction::Beep : NodeAction::Listen;
      p.push_back(std::make_unique<Scripted>(script));
    }
    return run_rounds(ch, p, 100);
  };
  CHECK(run().transcripts == run().transcripts);
}

TEST_CASE("closed-neighborhood beeper counts") {
  const auto t = Topology::path(4);
  Channel ch(t, Model::BL);
  one_slot(ch, {Action::Beep, Action::Listen, Action::Listen, Action::Beep});
  CHECK(ch.last_max_closed_beepers() == 1);
  one_slot(ch, {Action::Beep, Action::Beep, Action::Listen, Action::Listen});
  CHECK(ch.last_max_closed_beepers() == 2);
  one_slot(ch, {Action::Listen, Action::Listen, Action::Listen, Action::Listen});
  CHECK(ch.max_closed_beepers() == 2);
  CHECK(ch.slots() == 3);
}
