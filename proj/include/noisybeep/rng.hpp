#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>
#include <stdexcept>

namespace nbeep {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Stream-splitting rule: seed = fold of mix64 over (master, tag0, tag1, ...).
/// Every random stream in the library (per-trial, per-node, channel noise)
/// is obtained this way so that streams are independent and individually
/// re-runnable.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> tags) noexcept {
  std::uint64_t s = mix64(master);
  for (auto t : tags) s = mix64(s ^ mix64(t + 0x632be59bd9b4e019ULL));
  return s;
}

namespace stream {
inline constexpr std::uint64_t kNoise = 0x6e6f697365ULL;   // "noise"
inline constexpr std::uint64_t kNode = 0x6e6f6465ULL;      // "node"
inline constexpr std::uint64_t kTrial = 0x747269616cULL;   // "trial"
inline constexpr std::uint64_t kInput = 0x696e707574ULL;   // "input"
inline constexpr std::uint64_t kCode = 0x636f6465ULL;      // "code"
}  // namespace stream

/// Bernoulli(p) as an integer comparison against a 64-bit threshold.
/// p is represented exactly up to 2^-64 resolution; p == 0 never fires.
class BernoulliThreshold {
 public:
  explicit BernoulliThreshold(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probability out of [0,1]");
    if (p >= 1.0) {
      always_ = true;
    } else {
      threshold_ = static_cast<std::uint64_t>(p * 18446744073709551616.0);
    }
  }
  bool operator()(Rng& rng) const {
    const std::uint64_t u = rng();
    return always_ || u < threshold_;
  }

 private:
  std::uint64_t threshold_ = 0;
  bool always_ = false;
};

/// Uniform integer in [0, bound) without modulo bias.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  std::uniform_int_distribution<std::uint64_t> dist(0, bound - 1);
  return dist(rng);
}

}  // namespace nbeep
