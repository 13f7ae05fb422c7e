#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace nbeep {

/// Fixed-length bit string. Bit 0 is the first (leftmost) bit when printed.
class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(std::size_t size, bool value = false);

  /// Parses a string of '0'/'1' characters.
  static BitVec from_string(std::string_view bits);
  /// The low `width` bits of `value`, most-significant bit first.
  static BitVec from_uint(std::uint64_t value, std::size_t width);

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  bool get(std::size_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1U; }
  bool operator[](std::size_t i) const noexcept { return get(i); }
  void set(std::size_t i, bool v) noexcept {
    const std::uint64_t m = std::uint64_t{1} << (i & 63);
    if (v) {
      words_[i >> 6] |= m;
    } else {
      words_[i >> 6] &= ~m;
    }
  }
  void flip(std::size_t i) noexcept { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

  std::size_t weight() const noexcept;
  /// Reads bits [pos, pos+width) as an unsigned integer, first bit most significant.
  std::uint64_t to_uint(std::size_t pos, std::size_t width) const;
  std::uint64_t to_uint() const { return to_uint(0, size_); }

  BitVec slice(std::size_t pos, std::size_t len) const;
  void append(const BitVec& other);
  void push_back(bool v);

  std::string to_string() const;

  BitVec& operator|=(const BitVec& o);
  BitVec& operator^=(const BitVec& o);
  friend BitVec operator|(BitVec a, const BitVec& b) { return a |= b; }
  friend BitVec operator^(BitVec a, const BitVec& b) { return a ^= b; }
  friend bool operator==(const BitVec& a, const BitVec& b) noexcept {
    return a.size_ == b.size_ && a.words_ == b.words_;
  }

  const std::vector<std::uint64_t>& words() const noexcept { return words_; }

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Hamming distance; throws std::invalid_argument on length mismatch.
std::size_t hamming_distance(const BitVec& a, const BitVec& b);

}  // namespace nbeep
