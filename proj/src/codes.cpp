#include "noisybeep/codes.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <tuple>
#include <stdexcept>

#include "noisybeep/galois.hpp"

namespace nbeep {

namespace detail {

class CodeImpl {
 public:
  virtual ~CodeImpl() = default;
  virtual std::size_t k() const noexcept = 0;
  virtual std::size_t n() const noexcept = 0;
  virtual std::size_t min_distance() const noexcept = 0;
  virtual bool exhaustive() const noexcept = 0;
  virtual std::string describe() const = 0;
  virtual BitVec encode(const BitVec& message) const = 0;
  virtual std::optional<BitVec> decode(const BitVec& word) const = 0;
};

namespace {

constexpr std::size_t kTableMaxBits = 16;
constexpr std::size_t kImportMaxBits = 14;

/// Full codebook stored contiguously, message value i at row i.
class TableCode final : public CodeImpl {
 public:
  /// `known_distance` comes from a linear-code weight enumeration; when absent the
  /// codebook is scanned pairwise.
  TableCode(std::size_t k, std::size_t n, std::vector<std::uint64_t> flat, std::string how,
            std::optional<std::size_t> known_distance = std::nullopt)
      : k_(k), n_(n), stride_((n + 63) / 64), flat_(std::move(flat)), how_(std::move(how)) {
    min_distance_ = known_distance ? *known_distance : scan_min_distance();
  }

  std::size_t k() const noexcept override { return k_; }
  std::size_t n() const noexcept override { return n_; }
  std::size_t min_distance() const noexcept override { return min_distance_; }
  bool exhaustive() const noexcept override { return true; }
  std::string describe() const override { return how_; }

  BitVec encode(const BitVec& message) const override {
    if (message.size() != k_) throw std::invalid_argument("encode: message length != k");
    return row(message.to_uint());
  }

  std::optional<BitVec> decode(const BitVec& word) const override {
    auto [idx, dist] = nearest(word);
    (void)dist;
    return BitVec::from_uint(idx, k_);
  }

  /// Index of the closest codeword (lowest index on ties) and its distance.
  std::pair<std::uint64_t, std::size_t> nearest(const BitVec& word) const {
    if (word.size() != n_) throw std::invalid_argument("decode: word length != n");
    const auto& w = word.words();
    std::uint64_t best = 0;
    std::size_t best_d = n_ + 1;
    const std::size_t count = std::size_t{1} << k_;
    for (std::size_t i = 0; i < count; ++i) {
      const std::uint64_t* c = &flat_[i * stride_];
      std::size_t d = 0;
      for (std::size_t j = 0; j < stride_ && d < best_d; ++j) d += static_cast<std::size_t>(std::popcount(c[j] ^ w[j]));
      if (d < best_d) {
        best_d = d;
        best = i;
        if (d == 0) break;
      }
    }
    return {best, best_d};
  }

  BitVec row(std::uint64_t i) const {
    BitVec out(n_);
    for (std::size_t b = 0; b < n_; ++b) out.set(b, (flat_[i * stride_ + (b >> 6)] >> (b & 63)) & 1U);
    return out;
  }

 private:
  std::size_t scan_min_distance() const {
    const std::size_t count = std::size_t{1} << k_;
    std::size_t best = n_;
    for (std::size_t a = 0; a < count; ++a)
      for (std::size_t b = a + 1; b < count; ++b) {
        std::size_t d = 0;
        for (std::size_t j = 0; j < stride_; ++j)
          d += static_cast<std::size_t>(std::popcount(flat_[a * stride_ + j] ^ flat_[b * stride_ + j]));
        best = std::min(best, d);
      }
    return count > 1 ? best : n_;
  }

  std::size_t k_, n_, stride_;
  std::vector<std::uint64_t> flat_;
  std::string how_;
  std::size_t min_distance_ = 0;
};

struct LinearCandidate {
  std::vector<std::uint64_t> flat;
  std::size_t min_weight = 0;
};

/// Enumerates the span of a systematic generator [I | P] in Gray-code order.
/// Stops early (returning nullopt) once a nonzero codeword lighter than
/// `abort_below` is seen.
std::optional<LinearCandidate> enumerate_linear(std::size_t k, std::size_t n, Rng& rng, std::size_t abort_below) {
  const std::size_t stride = (n + 63) / 64;
  std::vector<std::vector<std::uint64_t>> rows(k, std::vector<std::uint64_t>(stride, 0));
  for (std::size_t r = 0; r < k; ++r) {
    rows[r][r >> 6] |= std::uint64_t{1} << (r & 63);
    for (std::size_t b = k; b < n; ++b)
      if (rng() >> 63) rows[r][b >> 6] |= std::uint64_t{1} << (b & 63);
  }
  const std::size_t count = std::size_t{1} << k;
  LinearCandidate out;
  out.flat.assign(count * stride, 0);
  out.min_weight = n;
  std::vector<std::uint64_t> cur(stride, 0);
  for (std::size_t i = 1; i < count; ++i) {
    const auto bit = static_cast<std::size_t>(std::countr_zero(i));
    const auto& g = rows[k - 1 - bit];
    std::size_t w = 0;
    for (std::size_t j = 0; j < stride; ++j) {
      cur[j] ^= g[j];
      w += static_cast<std::size_t>(std::popcount(cur[j]));
    }
    if (w < abort_below) return std::nullopt;
    out.min_weight = std::min(out.min_weight, w);
    const std::size_t msg = i ^ (i >> 1);
    std::copy(cur.begin(), cur.end(), out.flat.begin() + static_cast<std::ptrdiff_t>(msg * stride));
  }
  return out;
}

std::size_t linear_attempts(std::size_t k) { return k <= 8 ? 96 : (k <= 12 ? 48 : 12); }

std::shared_ptr<const TableCode> repetition_code(std::size_t n) {
  std::vector<std::uint64_t> flat(2 * ((n + 63) / 64), 0);
  BitVec ones(n, true);
  std::copy(ones.words().begin(), ones.words().end(), flat.begin() + static_cast<std::ptrdiff_t>(ones.words().size()));
  return std::make_shared<TableCode>(1, n, std::move(flat), "repetition[" + std::to_string(n) + "]", n);
}

/// Searched linear [n, k] code with minimum distance >= min_d, if one is found.
std::shared_ptr<const TableCode> search_linear(std::size_t k, std::size_t n, std::size_t min_d) {
  if (k == 1) return n >= min_d ? repetition_code(n) : nullptr;
  if (min_d > n - k + 1) return nullptr;  // Singleton bound
  Rng rng(derive_seed(stream::kCode, {k, n, min_d}));
  for (std::size_t a = 0; a < linear_attempts(k); ++a) {
    auto cand = enumerate_linear(k, n, rng, min_d);
    if (cand)
      return std::make_shared<TableCode>(k, n, std::move(cand->flat),
                                         "linear[" + std::to_string(n) + "," + std::to_string(k) + "]",
                                         cand->min_weight);
  }
  return nullptr;
}

/// Best-distance searched linear [n, m] code, cached; used as the inner code.
std::shared_ptr<const TableCode> inner_code(std::size_t m, std::size_t n) {
  static std::mutex mu;
  static std::map<std::pair<std::size_t, std::size_t>, std::shared_ptr<const TableCode>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{m, n}];
  if (slot) return slot;
  Rng rng(derive_seed(stream::kCode, {0x696eULL, m, n}));
  std::optional<LinearCandidate> best;
  for (std::size_t a = 0; a < 48; ++a) {
    auto cand = enumerate_linear(m, n, rng, best ? best->min_weight + 1 : 0);
    if (cand && (!best || cand->min_weight > best->min_weight)) best = std::move(cand);
    if (best && best->min_weight == n - m + 1) break;
  }
  slot = std::make_shared<TableCode>(m, n, std::move(best->flat),
                                     "linear[" + std::to_string(n) + "," + std::to_string(m) + "]", best->min_weight);
  return slot;
}

/// Reed-Solomon over GF(2^m) concatenated with a binary inner [n_i, m] code,
/// zero-padded to the block length. Decoded with generalized minimum distance.
class ConcatenatedCode final : public CodeImpl {
 public:
  ConcatenatedCode(std::size_t k, std::size_t n, unsigned m, std::size_t outer_n,
                   std::shared_ptr<const TableCode> inner)
      : k_(k),
        n_(n),
        m_(m),
        outer_(m, outer_n, (k + m - 1) / m),
        inner_(std::move(inner)),
        distance_(outer_.distance() * inner_->min_distance()) {}

  std::size_t k() const noexcept override { return k_; }
  std::size_t n() const noexcept override { return n_; }
  std::size_t min_distance() const noexcept override { return distance_; }
  bool exhaustive() const noexcept override { return false; }
  std::string describe() const override {
    std::ostringstream s;
    s << "RS[" << outer_.n() << "," << outer_.k() << "]/GF(2^" << m_ << ") o " << inner_->describe();
    if (pad() > 0) s << " + " << pad() << " pad";
    return s.str();
  }

  BitVec encode(const BitVec& message) const override {
    if (message.size() != k_) throw std::invalid_argument("encode: message length != k");
    return encode_symbols(to_symbols(message));
  }

  std::optional<BitVec> decode(const BitVec& word) const override {
    if (word.size() != n_) throw std::invalid_argument("decode: word length != n");
    const std::size_t on = outer_.n();
    const std::size_t ni = inner_->n();
    std::vector<ReedSolomon::Elem> symbols(on);
    std::vector<std::size_t> dist(on);
    for (std::size_t j = 0; j < on; ++j) {
      auto [s, d] = inner_->nearest(word.slice(j * ni, ni));
      symbols[j] = static_cast<ReedSolomon::Elem>(s);
      dist[j] = d;
    }
    std::vector<std::size_t> order(on);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist[a] > dist[b]; });

    std::optional<BitVec> best;
    std::size_t best_d = n_ + 1;
    std::unique_ptr<bool[]> erased(new bool[on]());
    for (std::size_t erasures = 0; erasures < outer_.distance(); ++erasures) {
      if (erasures > 0) erased[order[erasures - 1]] = true;
      auto msg = outer_.decode(symbols, std::span<const bool>(erased.get(), on));
      if (!msg) continue;
      const BitVec cw = encode_symbols(*msg);
      const std::size_t d = hamming_distance(cw, word);
      if (d < best_d) {
        best_d = d;
        best = from_symbols(*msg);
      }
    }
    return best;
  }

 private:
  std::size_t pad() const noexcept { return n_ - outer_.n() * inner_->n(); }

  std::vector<ReedSolomon::Elem> to_symbols(const BitVec& message) const {
    std::vector<ReedSolomon::Elem> sym(outer_.k(), 0);
    for (std::size_t i = 0; i < k_; ++i)
      if (message.get(i)) sym[i / m_] |= static_cast<ReedSolomon::Elem>(1U << (m_ - 1 - i % m_));
    return sym;
  }

  BitVec from_symbols(const std::vector<ReedSolomon::Elem>& sym) const {
    BitVec out(k_);
    for (std::size_t i = 0; i < k_; ++i) out.set(i, (sym[i / m_] >> (m_ - 1 - i % m_)) & 1U);
    return out;
  }

  BitVec encode_symbols(const std::vector<ReedSolomon::Elem>& sym) const {
    const auto outer_cw = outer_.encode(sym);
    BitVec out;
    for (auto s : outer_cw) out.append(inner_->row(s));
    out.append(BitVec(pad()));
    return out;
  }

  std::size_t k_, n_;
  unsigned m_;
  ReedSolomon outer_;
  std::shared_ptr<const TableCode> inner_;
  std::size_t distance_;
};

std::shared_ptr<const CodeImpl> search_concatenated(std::size_t k, std::size_t n, std::size_t min_d) {
  std::shared_ptr<const CodeImpl> best;
  std::size_t best_d = 0;
  for (unsigned m = 2; m <= 8; ++m) {
    const std::size_t ko = (k + m - 1) / m;
    const std::size_t max_on = std::min<std::size_t>((std::size_t{1} << m) - 1, n / m);
    for (std::size_t on = ko; on <= max_on; ++on) {
      const std::size_t ni = n / on;
      if (ni < m) continue;
      const std::size_t outer_d = on - ko + 1;
      if (outer_d * (ni - m + 1) < std::max(min_d, best_d + 1)) continue;  // Singleton bound on the inner code
      auto inner = inner_code(m, ni);
      const std::size_t d = outer_d * inner->min_distance();
      if (d >= min_d && d > best_d) {
        best_d = d;
        best = std::make_shared<ConcatenatedCode>(k, n, m, on, std::move(inner));
      }
    }
  }
  return best;
}

std::shared_ptr<const CodeImpl> construct_at(std::size_t k, std::size_t n, std::size_t min_d) {
  if (min_d > n) return nullptr;
  if (k <= kTableMaxBits) {
    if (auto c = search_linear(k, n, min_d)) return c;
  }
  if (k >= 2) return search_concatenated(k, n, min_d);
  return nullptr;
}

void check_args(std::size_t k, double delta) {
  if (k == 0) throw std::invalid_argument("block code needs k >= 1");
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("relative distance must lie in (0, 1]");
}

}  // namespace
}  // namespace detail

std::size_t required_distance(std::size_t n, double delta) {
  const double scaled = delta * static_cast<double>(n);
  const auto at_least = static_cast<std::size_t>(std::ceil(scaled - 1e-9));
  const auto radius = static_cast<std::size_t>(std::floor(scaled / 2.0 + 1e-9));
  return std::max(at_least, 2 * radius + 1);
}

std::optional<BlockCode> try_build_block_code_with_length(std::size_t k, double delta, std::size_t n) {
  detail::check_args(k, delta);
  if (n < k) return std::nullopt;
  // Construction is deterministic, so results (including failures) are memoized.
  static std::mutex mu;
  static std::map<std::tuple<std::size_t, double, std::size_t>, std::shared_ptr<const detail::CodeImpl>> memo;
  const auto key = std::make_tuple(k, delta, n);
  {
    std::lock_guard lock(mu);
    if (auto it = memo.find(key); it != memo.end()) {
      if (!it->second) return std::nullopt;
      return BlockCode(it->second, delta);
    }
  }
  auto impl = detail::construct_at(k, n, required_distance(n, delta));
  std::lock_guard lock(mu);
  memo[key] = impl;
  if (!impl) return std::nullopt;
  return BlockCode(std::move(impl), delta);
}

BlockCode build_block_code(std::size_t k, double delta) {
  detail::check_args(k, delta);
  const std::size_t budget = 64 * k + 4096;
  for (std::size_t n = k; n <= budget; ++n) {
    if (required_distance(n, delta) > n) continue;
    if (auto code = try_build_block_code_with_length(k, delta, n)) return *code;
  }
  throw std::runtime_error("no code with k=" + std::to_string(k) + " and relative distance " + std::to_string(delta) +
                           " within the block-length budget");
}

BlockCode build_block_code_with_length(std::size_t k, double delta, std::size_t n) {
  if (n < k) throw std::invalid_argument("block length shorter than the message");
  if (auto code = try_build_block_code_with_length(k, delta, n)) return *code;
  throw std::runtime_error("no [" + std::to_string(n) + "," + std::to_string(k) + "] code with relative distance " +
                           std::to_string(delta) + " found");
}

std::size_t BlockCode::message_bits() const noexcept { return impl_->k(); }
std::size_t BlockCode::block_length() const noexcept { return impl_->n(); }
std::size_t BlockCode::min_distance() const noexcept { return impl_->min_distance(); }
bool BlockCode::exhaustively_verified() const noexcept { return impl_->exhaustive(); }
std::string BlockCode::construction() const { return impl_->describe(); }
std::size_t BlockCode::decoding_radius() const noexcept {
  return static_cast<std::size_t>(std::floor(delta_ * static_cast<double>(block_length()) / 2.0 + 1e-9));
}
BitVec BlockCode::encode(const BitVec& message) const { return impl_->encode(message); }
std::optional<BitVec> BlockCode::decode(const BitVec& word) const { return impl_->decode(word); }

std::vector<BitVec> BlockCode::codewords() const {
  if (message_bits() > 20) throw std::length_error("codebook too large to enumerate");
  std::vector<BitVec> out;
  const std::uint64_t count = std::uint64_t{1} << message_bits();
  out.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) out.push_back(encode(i));
  return out;
}

std::string write_codebook(const BlockCode& code) {
  std::string out;
  for (const auto& c : code.codewords()) {
    out += c.to_string();
    out += '\n';
  }
  return out;
}

BlockCode read_codebook(const std::string& text) {
  std::istringstream in(text);
  std::vector<BitVec> rows;
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    rows.push_back(BitVec::from_string(line));
    if (rows.back().size() != rows.front().size()) throw std::invalid_argument("codebook rows differ in length");
  }
  if (rows.size() < 2 || !std::has_single_bit(rows.size()))
    throw std::invalid_argument("codebook size must be a power of two >= 2");
  const auto k = static_cast<std::size_t>(std::countr_zero(rows.size()));
  if (k > detail::kImportMaxBits) throw std::invalid_argument("codebook too large");
  const std::size_t n = rows.front().size();
  std::vector<std::uint64_t> flat;
  for (const auto& r : rows) flat.insert(flat.end(), r.words().begin(), r.words().end());
  auto impl = std::make_shared<detail::TableCode>(k, n, std::move(flat), "imported[" + std::to_string(n) + "," +
                                                                             std::to_string(k) + "]");
  const std::size_t d = impl->min_distance();
  if (d == 0) throw std::invalid_argument("codebook has repeated codewords");
  const std::size_t usable = (d % 2 == 1) ? d : d - 1;
  return BlockCode(std::move(impl), double(usable) / double(n));
}

BitVec balance(const BitVec& word) {
  BitVec out(2 * word.size());
  for (std::size_t i = 0; i < word.size(); ++i) {
    out.set(2 * i, word.get(i));
    out.set(2 * i + 1, !word.get(i));
  }
  return out;
}

BalancedCode balance(const BlockCode& base) { return BalancedCode(base); }

std::vector<BitVec> BalancedCode::codewords() const {
  auto cws = base_.codewords();
  for (auto& c : cws) c = balance(c);
  return cws;
}

std::size_t or_weight(const BitVec& a, const BitVec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("or_weight: length mismatch");
  return (a | b).weight();
}

BitVec random_bits(std::size_t n, Rng& rng) {
  BitVec out(n);
  std::uint64_t pool = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if ((i & 63) == 0) pool = rng();
    out.set(i, (pool >> (i & 63)) & 1U);
  }
  return out;
}

BitVec sample_codeword(const BalancedCode& code, Rng& rng) { return code.encode(random_bits(code.message_bits(), rng)); }

}  // namespace nbeep
