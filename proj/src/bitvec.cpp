#include "noisybeep/bitvec.hpp"

#include <bit>
#include <stdexcept>

namespace nbeep {

BitVec::BitVec(std::size_t size, bool value)
    : size_(size), words_((size + 63) / 64, value ? ~std::uint64_t{0} : 0) {
  if (value && (size_ & 63) != 0) words_.back() &= (std::uint64_t{1} << (size_ & 63)) - 1;
}

BitVec BitVec::from_string(std::string_view bits) {
  BitVec v(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      v.set(i, true);
    } else if (bits[i] != '0') {
      throw std::invalid_argument("bit string contains a character other than 0/1");
    }
  }
  return v;
}

BitVec BitVec::from_uint(std::uint64_t value, std::size_t width) {
  if (width > 64) throw std::invalid_argument("from_uint: width > 64");
  BitVec v(width);
  for (std::size_t i = 0; i < width; ++i) v.set(i, (value >> (width - 1 - i)) & 1U);
  return v;
}

std::size_t BitVec::weight() const noexcept {
  std::size_t w = 0;
  for (auto x : words_) w += static_cast<std::size_t>(std::popcount(x));
  return w;
}

std::uint64_t BitVec::to_uint(std::size_t pos, std::size_t width) const {
  if (width > 64 || pos + width > size_) throw std::out_of_range("to_uint: range");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < width; ++i) v = (v << 1) | (get(pos + i) ? 1U : 0U);
  return v;
}

BitVec BitVec::slice(std::size_t pos, std::size_t len) const {
  if (pos + len > size_) throw std::out_of_range("slice: range");
  BitVec out(len);
  for (std::size_t i = 0; i < len; ++i) out.set(i, get(pos + i));
  return out;
}

void BitVec::append(const BitVec& other) {
  const std::size_t base = size_;
  size_ += other.size_;
  words_.resize((size_ + 63) / 64, 0);
  for (std::size_t i = 0; i < other.size_; ++i) set(base + i, other.get(i));
}

void BitVec::push_back(bool v) {
  ++size_;
  if (words_.size() * 64 < size_) words_.push_back(0);
  set(size_ - 1, v);
}

std::string BitVec::to_string() const {
  std::string s(size_, '0');
  for (std::size_t i = 0; i < size_; ++i)
    if (get(i)) s[i] = '1';
  return s;
}

BitVec& BitVec::operator|=(const BitVec& o) {
  if (o.size_ != size_) throw std::invalid_argument("BitVec length mismatch");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
  return *this;
}

BitVec& BitVec::operator^=(const BitVec& o) {
  if (o.size_ != size_) throw std::invalid_argument("BitVec length mismatch");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= o.words_[i];
  return *this;
}

std::size_t hamming_distance(const BitVec& a, const BitVec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("hamming_distance: length mismatch");
  std::size_t d = 0;
  const auto& wa = a.words();
  const auto& wb = b.words();
  for (std::size_t i = 0; i < wa.size(); ++i) d += static_cast<std::size_t>(std::popcount(wa[i] ^ wb[i]));
  return d;
}

}  // namespace nbeep
