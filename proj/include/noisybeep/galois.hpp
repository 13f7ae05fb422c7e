#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace nbeep {

/// GF(2^m) for 2 <= m <= 8, log/antilog tables over a fixed primitive polynomial.
class GaloisField {
 public:
  using Elem = std::uint16_t;

  explicit GaloisField(unsigned m);

  unsigned bits() const noexcept { return m_; }
  std::size_t size() const noexcept { return q_; }
  Elem add(Elem a, Elem b) const noexcept { return a ^ b; }
  Elem mul(Elem a, Elem b) const noexcept {
    if (a == 0 || b == 0) return 0;
    return exp_[log_[a] + log_[b]];
  }
  Elem inv(Elem a) const;
  Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }
  /// alpha^i for the primitive element alpha.
  Elem alpha_pow(std::size_t i) const noexcept { return exp_[i % (q_ - 1)]; }

 private:
  unsigned m_;
  std::size_t q_;
  std::vector<Elem> exp_;
  std::vector<std::size_t> log_;
};

/// Evaluation-form Reed-Solomon code: a message of k symbols is the coefficient
/// vector of P, and the codeword is (P(alpha^0), ..., P(alpha^{n-1})).
class ReedSolomon {
 public:
  using Elem = GaloisField::Elem;

  ReedSolomon(unsigned m, std::size_t n, std::size_t k);

  std::size_t n() const noexcept { return n_; }
  std::size_t k() const noexcept { return k_; }
  std::size_t distance() const noexcept { return n_ - k_ + 1; }
  const GaloisField& field() const noexcept { return gf_; }

  std::vector<Elem> encode(std::span<const Elem> message) const;

  /// Errors-and-erasures decoding (Berlekamp-Welch on the unerased positions).
  /// Succeeds whenever 2*errors + erasures < distance(). Returns the message.
  std::optional<std::vector<Elem>> decode(std::span<const Elem> received,
                                          std::span<const bool> erased) const;

 private:
  GaloisField gf_;
  std::size_t n_;
  std::size_t k_;
  std::vector<Elem> points_;
};

}  // namespace nbeep
