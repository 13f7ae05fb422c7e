#include "noisybeep/galois.hpp"

#include <stdexcept>

namespace nbeep {

namespace {
constexpr unsigned kPrimitive[9] = {0, 0, 0x7, 0xB, 0x13, 0x25, 0x43, 0x89, 0x11D};
}

GaloisField::GaloisField(unsigned m) : m_(m), q_(std::size_t{1} << m) {
  if (m < 2 || m > 8) throw std::invalid_argument("GaloisField: m must be in [2, 8]");
  exp_.resize(2 * q_);
  log_.resize(q_, 0);
  unsigned x = 1;
  for (std::size_t i = 0; i < q_ - 1; ++i) {
    exp_[i] = static_cast<Elem>(x);
    log_[x] = i;
    x <<= 1;
    if (x & q_) x ^= kPrimitive[m];
  }
  for (std::size_t i = q_ - 1; i < exp_.size(); ++i) exp_[i] = exp_[i - (q_ - 1)];
}

GaloisField::Elem GaloisField::inv(Elem a) const {
  if (a == 0) throw std::domain_error("GaloisField: inverse of zero");
  return exp_[(q_ - 1) - log_[a]];
}

ReedSolomon::ReedSolomon(unsigned m, std::size_t n, std::size_t k) : gf_(m), n_(n), k_(k) {
  if (k < 1 || k > n || n > gf_.size() - 1) throw std::invalid_argument("ReedSolomon: need 1 <= k <= n <= 2^m - 1");
  points_.resize(n);
  for (std::size_t i = 0; i < n; ++i) points_[i] = gf_.alpha_pow(i);
}

std::vector<ReedSolomon::Elem> ReedSolomon::encode(std::span<const Elem> message) const {
  if (message.size() != k_) throw std::invalid_argument("ReedSolomon::encode: wrong message length");
  std::vector<Elem> out(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    Elem acc = 0;
    for (std::size_t j = k_; j-- > 0;) acc = gf_.add(gf_.mul(acc, points_[i]), message[j]);
    out[i] = acc;
  }
  return out;
}

namespace {

// Solves A x = b over the field; free variables are set to zero.
std::optional<std::vector<GaloisField::Elem>> solve(const GaloisField& gf,
                                                    std::vector<std::vector<GaloisField::Elem>> a,
                                                    std::vector<GaloisField::Elem> b, std::size_t cols) {
  const std::size_t rows = a.size();
  std::vector<std::size_t> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && a[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[r]);
    std::swap(b[p], b[r]);
    const auto inv = gf.inv(a[r][c]);
    for (std::size_t j = c; j < cols; ++j) a[r][j] = gf.mul(a[r][j], inv);
    b[r] = gf.mul(b[r], inv);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      const auto f = a[i][c];
      for (std::size_t j = c; j < cols; ++j) a[i][j] ^= gf.mul(f, a[r][j]);
      b[i] ^= gf.mul(f, b[r]);
    }
    pivot_col.push_back(c);
    ++r;
  }
  for (std::size_t i = r; i < rows; ++i)
    if (b[i] != 0) return std::nullopt;
  std::vector<GaloisField::Elem> x(cols, 0);
  for (std::size_t i = 0; i < r; ++i) x[pivot_col[i]] = b[i];
  return x;
}

}  // namespace

std::optional<std::vector<ReedSolomon::Elem>> ReedSolomon::decode(std::span<const Elem> received,
                                                                  std::span<const bool> erased) const {
  if (received.size() != n_ || erased.size() != n_) throw std::invalid_argument("ReedSolomon::decode: wrong length");
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < n_; ++i)
    if (!erased[i]) kept.push_back(i);
  if (kept.size() < k_) return std::nullopt;
  const std::size_t e = (kept.size() - k_) / 2;

  // Unknowns: Q_0..Q_{e+k-1}, then E_0..E_{e-1}; E is monic of degree e.
  // Equation per kept position: Q(x) - y * sum_t E_t x^t = y * x^e.
  const std::size_t qn = e + k_;
  const std::size_t cols = qn + e;
  std::vector<std::vector<Elem>> a(kept.size(), std::vector<Elem>(cols, 0));
  std::vector<Elem> b(kept.size(), 0);
  for (std::size_t row = 0; row < kept.size(); ++row) {
    const Elem x = points_[kept[row]];
    const Elem y = received[kept[row]];
    Elem xp = 1;
    for (std::size_t t = 0; t < qn; ++t) {
      a[row][t] = xp;
      if (t < e) a[row][qn + t] = gf_.mul(y, xp);  // subtraction == addition in char 2
      xp = gf_.mul(xp, x);
    }
    Elem xe = 1;
    for (std::size_t t = 0; t < e; ++t) xe = gf_.mul(xe, x);
    b[row] = gf_.mul(y, xe);
  }
  auto sol = solve(gf_, std::move(a), std::move(b), cols);
  if (!sol) return std::nullopt;

  // Polynomial long division Q / E.
  std::vector<Elem> rem(sol->begin(), sol->begin() + static_cast<std::ptrdiff_t>(qn));
  std::vector<Elem> divisor(e + 1, 0);
  for (std::size_t t = 0; t < e; ++t) divisor[t] = (*sol)[qn + t];
  divisor[e] = 1;
  std::vector<Elem> quotient(k_, 0);
  for (std::size_t deg = qn; deg-- > e;) {
    const Elem coef = rem[deg];
    if (coef == 0) continue;
    const std::size_t shift = deg - e;
    if (shift >= k_) return std::nullopt;
    quotient[shift] = coef;
    for (std::size_t t = 0; t <= e; ++t) rem[shift + t] ^= gf_.mul(coef, divisor[t]);
  }
  for (std::size_t t = 0; t < e; ++t)
    if (rem[t] != 0) return std::nullopt;

  const auto check = encode(quotient);
  std::size_t mismatches = 0;
  for (auto i : kept)
    if (check[i] != received[i]) ++mismatches;
  if (mismatches > e) return std::nullopt;
  return quotient;
}

}  // namespace nbeep
