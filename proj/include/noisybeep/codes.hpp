#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "noisybeep/bitvec.hpp"
#include "noisybeep/rng.hpp"

namespace nbeep {

namespace detail {
class CodeImpl;
}

/// Binary block code {0,1}^k -> {0,1}^n with declared relative distance delta.
///
/// Contract: distinct codewords differ in at least min_distance() >= delta*n
/// positions, and decode() recovers the message from any word within
/// decoding_radius() = floor(delta*n/2) flips of its codeword. To make the
/// radius unambiguous, built codes guarantee min_distance() > 2*decoding_radius().
///
/// Immutable; copies share the underlying tables.
class BlockCode {
 public:
  std::size_t message_bits() const noexcept;
  std::size_t block_length() const noexcept;
  double relative_distance() const noexcept { return delta_; }
  /// Guaranteed lower bound on the minimum distance (exact for exhaustively verified codes).
  std::size_t min_distance() const noexcept;
  std::size_t decoding_radius() const noexcept;
  double rate() const noexcept { return double(message_bits()) / double(block_length()); }
  /// True when min_distance() was verified by enumerating the whole codebook.
  bool exhaustively_verified() const noexcept;
  std::string construction() const;

  BitVec encode(const BitVec& message) const;
  BitVec encode(std::uint64_t message) const { return encode(BitVec::from_uint(message, message_bits())); }
  /// Nearest-codeword decoding for tabulated codes; generalized-minimum-distance
  /// decoding for concatenated codes. std::nullopt if no candidate is found.
  std::optional<BitVec> decode(const BitVec& word) const;

  /// Every codeword in message order; only for message_bits() <= 20.
  std::vector<BitVec> codewords() const;

 private:
  friend BlockCode build_block_code(std::size_t, double);
  friend std::optional<BlockCode> try_build_block_code_with_length(std::size_t, double, std::size_t);
  friend BlockCode read_codebook(const std::string&);
  BlockCode(std::shared_ptr<const detail::CodeImpl> impl, double delta) : impl_(std::move(impl)), delta_(delta) {}

  std::shared_ptr<const detail::CodeImpl> impl_;
  double delta_ = 0.0;
};

/// Smallest distance a length-n code must have to honor relative distance delta
/// with an unambiguous decoding radius: max(ceil(delta*n), 2*floor(delta*n/2) + 1).
std::size_t required_distance(std::size_t n, double delta);

/// Shortest code found for (k, delta). Message sizes up to 16 bits use a searched
/// linear code with a tabulated codebook; larger messages (or when the search
/// cannot reach the target) use Reed-Solomon concatenated with a searched inner code.
/// Throws std::invalid_argument for k == 0 or delta outside (0, 1], and
/// std::runtime_error when no construction fits the block-length budget.
BlockCode build_block_code(std::size_t k, double delta);
/// Same, at exactly `n` bits.
BlockCode build_block_code_with_length(std::size_t k, double delta, std::size_t n);
/// Non-throwing variant for callers that scan over lengths.
std::optional<BlockCode> try_build_block_code_with_length(std::size_t k, double delta, std::size_t n);

/// One codeword per line as a 0/1 string, in message order.
std::string write_codebook(const BlockCode& code);
/// Parses write_codebook output (2^k lines of equal length). The declared
/// relative distance is the largest one the scanned minimum distance supports.
BlockCode read_codebook(const std::string& text);

/// 0 -> 01, 1 -> 10.
BitVec balance(const BitVec& word);

/// Constant-weight code: a block code whose codewords pass through balance().
class BalancedCode {
 public:
  explicit BalancedCode(BlockCode base) : base_(std::move(base)) {}

  const BlockCode& base() const noexcept { return base_; }
  std::size_t length() const noexcept { return 2 * base_.block_length(); }
  std::size_t weight() const noexcept { return base_.block_length(); }
  std::size_t message_bits() const noexcept { return base_.message_bits(); }
  double relative_distance() const noexcept { return base_.relative_distance(); }
  std::size_t min_distance() const noexcept { return 2 * base_.min_distance(); }
  /// message_bits / length; the collision probability of two uniform draws is 2^{-rate*length}.
  double rate() const noexcept { return double(message_bits()) / double(length()); }

  BitVec encode(const BitVec& message) const { return balance(base_.encode(message)); }
  std::vector<BitVec> codewords() const;

 private:
  BlockCode base_;
};

BalancedCode balance(const BlockCode& base);

/// Weight of the bitwise OR; throws std::invalid_argument on length mismatch.
std::size_t or_weight(const BitVec& a, const BitVec& b);

/// Uniform message -> codeword.
BitVec sample_codeword(const BalancedCode& code, Rng& rng);
BitVec random_bits(std::size_t n, Rng& rng);

}  // namespace nbeep
