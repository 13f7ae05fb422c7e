#include "noisybeep/collision.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace nbeep {

std::string_view to_string(CDOutcome o) noexcept {
  switch (o) {
    case CDOutcome::Silence: return "silence";
    case CDOutcome::SingleSender: return "single_sender";
    case CDOutcome::Collision: return "collision";
  }
  return "?";
}

Fraction Fraction::from_double(double x) {
  if (!(x >= 0.0)) throw std::invalid_argument("Fraction: negative or NaN");
  constexpr std::int64_t kDen = 1'000'000;
  const auto num = static_cast<std::int64_t>(std::llround(x * double(kDen)));
  const auto g = std::gcd(num, kDen);
  return {num / g, kDen / g};
}

namespace {

void check_common(const BalancedCode& code) {
  if (code.length() % 2 != 0) throw std::invalid_argument("balanced code length must be even");
}

}  // namespace

CDParams CDParams::unchecked(BalancedCode code, double epsilon) {
  check_common(code);
  const Fraction delta = Fraction::from_double(code.relative_distance());
  return CDParams{std::move(code), delta, epsilon, 1.0};
}

CDParams CDParams::make(BalancedCode code, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 0.5)) throw std::invalid_argument("epsilon must lie in [0, 1/2)");
  if (code.length() < 8) throw std::invalid_argument("n_c must be at least 8");
  auto p = unchecked(std::move(code), epsilon);
  if (!(p.delta.value() > 4.0 * epsilon)) throw std::invalid_argument("delta must exceed 4*epsilon");
  if (!(p.delta.value() < 1.0)) throw std::invalid_argument("delta must be below 1");
  if (double(p.code.min_distance()) + 1e-9 < p.delta.value() * double(p.n_c()))
    throw std::invalid_argument("code distance does not cover delta");
  return p;
}

CDOutcome classify_count(std::size_t chi, const CDParams& params) {
  const std::size_t nc = params.n_c();
  if (chi > nc) throw std::out_of_range("beep count exceeds n_c");
  if (4 * chi < nc) return CDOutcome::Silence;
  // chi < (1 + delta/2)/2 * n_c  <=>  4 chi den < (2 den + num) n_c
  const auto lhs = static_cast<__int128>(4) * chi * params.delta.den;
  const auto rhs = static_cast<__int128>(2 * params.delta.den + params.delta.num) * nc;
  return lhs < rhs ? CDOutcome::SingleSender : CDOutcome::Collision;
}

double kl_divergence(double x, double y) {
  if (!(x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0)) throw std::domain_error("kl_divergence: arguments must lie in (0,1)");
  return x * std::log(x / y) + (1.0 - x) * std::log((1.0 - x) / (1.0 - y));
}

double default_delta(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 0.5)) throw std::domain_error("epsilon must lie in [0, 1/2)");
  if (epsilon <= 0.07) return 0.3;
  if (4.0 * epsilon >= 0.49) throw std::domain_error("no relative distance in (4*epsilon, 1/2) for this epsilon");
  const double mid = (4.0 * epsilon + 0.5) / 2.0;
  return std::ceil(mid * 100.0 - 1e-9) / 100.0;
}

double cd_noise_bound(double delta, double epsilon, std::size_t n_c) {
  if (epsilon == 0.0) return 0.0;
  const double n = double(n_c);
  const double quarter = delta / 4.0;
  const double collision_side = std::exp(-kl_divergence(quarter, epsilon) * n);
  const double silence_side = std::exp(-kl_divergence(0.5, epsilon) * n);
  const double single_side = std::exp(-2.0 * quarter * quarter * n);
  return std::max({collision_side, silence_side, single_side});
}

CDParams choose_cd_params(std::size_t n, std::size_t rounds, double epsilon, double target_failure,
                          std::optional<double> delta_override) {
  if (n < 1 || rounds < 1) throw std::invalid_argument("choose_cd_params: n and R must be positive");
  if (!(target_failure > 0.0)) throw std::invalid_argument("choose_cd_params: target must be positive");
  const double delta = delta_override ? *delta_override : default_delta(epsilon);
  if (!(delta > 4.0 * epsilon)) throw std::domain_error("choose_cd_params: delta must exceed 4*epsilon");
  if (!(delta > 0.0 && delta < 0.5 + 1e-12)) throw std::domain_error("choose_cd_params: delta must lie in (0, 1/2]");

  if (target_failure >= 1.0) {
    auto base = build_block_code_with_length(1, delta, 4);
    auto p = CDParams::make(BalancedCode(std::move(base)), epsilon);
    p.predicted_failure = 1.0;
    return p;
  }

  const double scale = double(n) * double(rounds);
  const auto k = static_cast<std::size_t>(std::max(1.0, std::ceil(std::log2(scale / target_failure) - 1e-12)));
  std::size_t nc = 8;
  while (scale * cd_noise_bound(delta, epsilon, nc) > target_failure) {
    nc += 2;
    if (nc > (1u << 24)) throw std::domain_error("choose_cd_params: bound not reachable");
  }
  for (;; nc += 2) {
    if (nc / 2 < k) continue;
    if (auto base = try_build_block_code_with_length(k, delta, nc / 2)) {
      auto p = CDParams::make(BalancedCode(std::move(*base)), epsilon);
      p.predicted_failure = scale * std::max(cd_noise_bound(delta, epsilon, nc), std::ldexp(1.0, -int(k)));
      return p;
    }
  }
}

void CollisionDetector::run(Channel& channel, std::span<const BitVec> codewords, std::span<CDOutcome> outcomes,
                            std::span<std::uint32_t> chi) {
  const std::size_t n = channel.topology().node_count();
  const std::size_t nc = params_->n_c();
  if (codewords.size() != n || outcomes.size() != n) throw std::invalid_argument("CollisionDetector: one entry per node");
  actions_.assign(n, Action::Listen);
  obs_.assign(n, Observation::None);
  counts_.assign(n, 0);
  std::vector<NodeId> active;
  for (NodeId v = 0; v < n; ++v) {
    if (codewords[v].empty()) continue;
    if (codewords[v].size() != nc) throw std::invalid_argument("CollisionDetector: codeword length != n_c");
    active.push_back(v);
  }
  for (std::size_t slot = 0; slot < nc; ++slot) {
    for (NodeId v : active) actions_[v] = codewords[v].get(slot) ? Action::Beep : Action::Listen;
    channel.step(actions_, obs_);
    for (NodeId v = 0; v < n; ++v)
      if (actions_[v] == Action::Beep || obs_[v] == Observation::Beep) ++counts_[v];
  }
  for (NodeId v = 0; v < n; ++v) {
    outcomes[v] = classify_count(counts_[v], *params_);
    if (!chi.empty()) chi[v] = counts_[v];
  }
}

CDRun run_collision_detection(const Topology& topology, std::span<const NodeId> active, const CDParams& params,
                              std::uint64_t seed) {
  const std::size_t n = topology.node_count();
  Channel channel(topology, Model::BLeps, {params.epsilon, derive_seed(seed, {stream::kNoise})});
  std::vector<BitVec> codewords(n);
  for (NodeId v : active) {
    if (v >= n) throw std::out_of_range("active node out of range");
    Rng rng(derive_seed(seed, {stream::kNode, v}));
    codewords[v] = sample_codeword(params.code, rng);
  }
  CDRun run;
  run.outcomes.resize(n);
  run.chi.resize(n);
  CollisionDetector detector(params);
  detector.run(channel, codewords, run.outcomes, run.chi);
  for (NodeId v = 0; v < n && !run.codeword_clash; ++v) {
    std::vector<const BitVec*> seen;
    auto consider = [&](NodeId u) {
      if (codewords[u].empty()) return;
      for (auto* s : seen)
        if (*s == codewords[u]) run.codeword_clash = true;
      seen.push_back(&codewords[u]);
    };
    consider(v);
    for (NodeId u : topology.neighbors(v)) consider(u);
  }
  return run;
}

std::vector<CDOutcome> expected_cd_outcomes(const Topology& topology, std::span<const NodeId> active) {
  const std::size_t n = topology.node_count();
  std::vector<std::uint32_t> count(n, 0);
  for (NodeId a : active) {
    ++count.at(a);
    for (NodeId v : topology.neighbors(a)) ++count[v];
  }
  std::vector<CDOutcome> out(n);
  for (NodeId v = 0; v < n; ++v)
    out[v] = count[v] == 0 ? CDOutcome::Silence : (count[v] == 1 ? CDOutcome::SingleSender : CDOutcome::Collision);
  return out;
}

}  // namespace nbeep
