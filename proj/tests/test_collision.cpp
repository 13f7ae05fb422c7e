#include <cmath>

#include "doctest.h"
#include "noisybeep/collision.hpp"

using namespace nbeep;

namespace {

double kl_oracle(double x, double y) { return x * std::log(x / y) + (1 - x) * std::log((1 - x) / (1 - y)); }

// Smallest even n_c >= 8 meeting the union bound, evaluated straight from the formula.
std::size_t nc_oracle(double nR, double eps, double delta, double target) {
  for (std::size_t nc = 8;; nc += 2) {
    double worst = std::exp(-2 * (delta / 4) * (delta / 4) * double(nc));
    if (eps > 0) {
      worst = std::max(worst, std::exp(-kl_oracle(delta / 4, eps) * double(nc)));
      worst = std::max(worst, std::exp(-kl_oracle(0.5, eps) * double(nc)));
    }
    if (nR * worst <= target) return nc;
  }
}

CDParams params_32_quarter() {
  // n_c = 32 from a 16-bit base code of relative distance 1/4
  auto base = try_build_block_code_with_length(3, 0.25, 16);
  REQUIRE(base.has_value());
  return CDParams::make(balance(*base), 0.0);
}

}  // namespace

TEST_CASE("classification thresholds at n_c = 32, delta = 1/4") {
  const auto p = params_32_quarter();
  REQUIRE(p.n_c() == 32);
  CHECK(p.alpha() == doctest::Approx(0.5625));
  CHECK(classify_count(7, p) == CDOutcome::Silence);
  CHECK(classify_count(8, p) == CDOutcome::SingleSender);
  CHECK(classify_count(16, p) == CDOutcome::SingleSender);
  CHECK(classify_count(17, p) == CDOutcome::SingleSender);
  CHECK(classify_count(18, p) == CDOutcome::Collision);
  CHECK_THROWS_AS(classify_count(33, p), std::out_of_range);
}

TEST_CASE("parameter invariants") {
  const auto tiny = balance(build_block_code_with_length(1, 0.5, 2));
  CHECK_THROWS(CDParams::make(tiny, 0.0));  // n_c = 4 < 8
  CHECK_NOTHROW(CDParams::unchecked(tiny, 0.2));
  const auto p = choose_cd_params(16, 10, 0.05, 1e-2);
  CHECK(p.n_c() % 2 == 0);
  CHECK(p.n_c() >= 8);
  CHECK(p.delta.value() > 4 * 0.05);
  CHECK(p.alpha() > 0.25);
  CHECK(p.alpha() < 0.75);
}

TEST_CASE("KL divergence") {
  CHECK(kl_divergence(0.3, 0.3) == doctest::Approx(0.0));
  CHECK(kl_divergence(0.5, 0.25) == doctest::Approx(kl_oracle(0.5, 0.25)).epsilon(1e-12));
  CHECK(kl_divergence(0.5, 0.25) == doctest::Approx(0.14384).epsilon(1e-4));
  for (double y : {0.1, 0.3, 0.6}) {
    double prev = 0;
    for (double x = y + 0.02; x < 0.99; x += 0.02) {
      const double d = kl_divergence(x, y);
      CHECK(d > prev);
      prev = d;
    }
    prev = 0;
    for (double x = y - 0.02; x > 0.01; x -= 0.02) {
      const double d = kl_divergence(x, y);
      CHECK(d > prev);
      prev = d;
    }
  }
  CHECK_THROWS_AS(kl_divergence(0.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(kl_divergence(0.5, 1.0), std::domain_error);
}

TEST_CASE("delta selection") {
  CHECK(default_delta(0.0) == doctest::Approx(0.3));
  CHECK(default_delta(0.05) == doctest::Approx(0.3));
  for (double eps = 0.0; eps < 0.12; eps += 0.01) CHECK(default_delta(eps) > 4 * eps);
  CHECK_THROWS(default_delta(0.2));
  CHECK(choose_cd_params(8, 1, 0.05, 1e-2).delta.value() > 0.2);
}

TEST_CASE("n_c follows the union bound") {
  for (double eps : {0.0, 0.02, 0.05}) {
    for (double nR : {64.0, 1024.0, 65536.0}) {
      const auto p = choose_cd_params(std::size_t(nR), 1, eps, 1e-3);
      CHECK(p.predicted_failure <= 1e-3 * (1 + 1e-9));
      if (eps > 0) CHECK(p.n_c() >= nc_oracle(nR, eps, p.delta.value(), 1e-3));
      // two uniform draws collide with probability 2^-k <= target/(nR)
      CHECK(std::ldexp(1.0, -int(p.code.message_bits())) <= 1e-3 / nR * (1 + 1e-12));
    }
  }
  CHECK(choose_cd_params(64, 100, 0.05, 1.0).n_c() == 8);
}

TEST_CASE("n_c grows logarithmically in nR") {
  std::vector<double> nc;
  for (int j = 8; j <= 20; j += 2) nc.push_back(double(choose_cd_params(std::size_t(1) << j, 1, 0.05, 1e-2).n_c()));
  // constant additive step per factor of 4 in nR: compare first and last increments
  std::vector<double> steps;
  for (std::size_t i = 1; i < nc.size(); ++i) steps.push_back(nc[i] - nc[i - 1]);
  for (double s : steps) {
    CHECK(s > 0);
    CHECK(s == doctest::Approx(steps.front()).epsilon(0.1));
  }
}

TEST_CASE("noiseless clique outcomes") {
  const auto t = Topology::clique(16);
  const auto p = choose_cd_params(16, 1, 0.0, 1e-3);
  Channel ch(t, Model::BLeps, {0.0, 1});
  CollisionDetector det(p);
  std::vector<BitVec> words(16);
  std::vector<CDOutcome> out(16);
  std::vector<std::uint32_t> chi(16);

  det.run(ch, words, out, chi);
  for (NodeId v = 0; v < 16; ++v) {
    CHECK(out[v] == CDOutcome::Silence);
    CHECK(chi[v] == 0);
  }

  Rng rng(4);
  words[3] = sample_codeword(p.code, rng);
  det.run(ch, words, out, chi);
  for (NodeId v = 0; v < 16; ++v) {
    CHECK(out[v] == CDOutcome::SingleSender);
    CHECK(chi[v] == p.n_c() / 2);
  }

  do words[9] = sample_codeword(p.code, rng);
  while (words[9] == words[3]);
  det.run(ch, words, out, chi);
  for (NodeId v = 0; v < 16; ++v) {
    CHECK(out[v] == CDOutcome::Collision);
    CHECK(double(chi[v]) >= double(p.n_c()) * (1 + p.delta.value()) / 2);
  }
}

TEST_CASE("noiseless classification is exact for every pair of a small code") {
  const auto p = CDParams::make(balance(build_block_code_with_length(3, 0.3, 8)), 0.0);
  const auto words = p.code.codewords();
  const auto t = Topology::clique(3);
  Channel ch(t, Model::BLeps, {0.0, 1});
  CollisionDetector det(p);
  std::vector<CDOutcome> out(3);
  for (std::size_t i = 0; i < words.size(); ++i)
    for (std::size_t j = 0; j < words.size(); ++j) {
      if (i == j) continue;
      const std::vector<BitVec> w{words[i], words[j], BitVec()};
      det.run(ch, w, out);
      for (auto o : out) CHECK(o == CDOutcome::Collision);
    }
}

TEST_CASE("non-clique topologies are judged per closed neighborhood") {
  const auto t = Topology::path(5);
  const auto p = choose_cd_params(5, 1, 0.0, 1e-6);
  const std::vector<NodeId> active{0, 4};
  const auto run = run_collision_detection(t, active, p, 12);
  CHECK(run.outcomes == expected_cd_outcomes(t, active));
  CHECK(run.outcomes[2] == CDOutcome::Silence);
  CHECK(run.outcomes[1] == CDOutcome::SingleSender);
  const std::vector<NodeId> pair{1, 3};
  CHECK(expected_cd_outcomes(t, pair)[2] == CDOutcome::Collision);
}

TEST_CASE("identical codewords are reported as a clash") {
  const auto p = CDParams::make(balance(build_block_code_with_length(1, 0.75, 4)), 0.0);
  const auto t = Topology::clique(2);
  const std::vector<NodeId> both{0, 1};
  bool seen = false;
  for (std::uint64_t seed = 0; seed < 40 && !seen; ++seed) {
    const auto run = run_collision_detection(t, both, p, seed);
    if (!run.codeword_clash) continue;
    seen = true;
    CHECK(run.outcomes[0] == CDOutcome::SingleSender);
  }
  CHECK(seen);
}

TEST_CASE("failure rate does not increase with n_c") {
  const double eps = 0.05;
  const auto t = Topology::clique(8);
  const std::vector<NodeId> one{2};
  const auto truth = expected_cd_outcomes(t, one);
  double prev_rate = 1.0, prev_se = 0.0;
  for (std::size_t base_len : {4u, 8u, 16u, 32u}) {
    const auto code = build_block_code_with_length(1, 0.3, base_len);
    const auto p = CDParams::make(balance(code), eps);
    const int N = 3000;
    int fails = 0;
    for (int s = 0; s < N; ++s) fails += run_collision_detection(t, one, p, derive_seed(5, {std::uint64_t(s)})).outcomes != truth;
    const double rate = fails / double(N);
    const double se = std::sqrt(std::max(rate, 1.0 / N) * (1 - rate) / N);
    CHECK(rate <= prev_rate + 3 * std::hypot(se, prev_se));
    prev_rate = rate;
    prev_se = se;
  }
}
