#pragma once

// Perron vector of A_0 + A_1, log-scaled product functionals, and the word
// measure eta([w]) = 3^-n e A_w p with its components eta_k (e replaced by e_k).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "gasket/errors.hpp"
#include "gasket/exactgeom.hpp"
#include "gasket/matrixgen.hpp"
#include "gasket/random.hpp"

namespace gasket {

struct PerronVector {
  std::vector<Rational> exact;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double min_entry() const { return *std::min_element(values.begin(), values.end()); }
};

/// Nullspace basis of an integer matrix over the rationals (reduced row echelon).
inline std::vector<std::vector<Rational>> rational_nullspace(const IntMatrix& m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  std::vector<std::vector<Rational>> a(rows, std::vector<Rational>(cols));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) a[i][j] = Rational(m(i, j));

  std::vector<std::size_t> pivot_cols;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && a[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[piv], a[r]);
    const Rational inv = 1 / a[r][c];
    for (auto& x : a[r]) x *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      const Rational f = a[i][c];
      for (std::size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
    }
    pivot_cols.push_back(c);
    ++r;
  }
  std::vector<char> is_pivot(cols, 0);
  for (auto c : pivot_cols) is_pivot[c] = 1;
  std::vector<std::vector<Rational>> basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    std::vector<Rational> v(cols, Rational(0));
    v[free] = 1;
    for (std::size_t k = 0; k < pivot_cols.size(); ++k) v[pivot_cols[k]] = -a[k][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Probability vector p with (A_0 + A_1) p = 3 p, solved exactly.
inline PerronVector perron_vector(const TransitionPair& tp) {
  const std::size_t m = tp.size();
  IntMatrix shifted = tp.A[0] + tp.A[1];
  for (std::size_t i = 0; i < m; ++i) shifted(i, i) -= 3;
  auto basis = rational_nullspace(shifted);
  if (basis.size() != 1)
    throw InvariantViolation("eigenvalue 3 of A0+A1 has geometric multiplicity " + std::to_string(basis.size()));
  Rational total = 0;
  for (const auto& x : basis[0]) total += x;
  if (total == 0) throw InvariantViolation("Perron eigenvector sums to zero");
  PerronVector pv;
  for (const auto& x : basis[0]) {
    pv.exact.push_back(x / total);
    if (pv.exact.back() <= 0) throw InvariantViolation("Perron vector is not strictly positive");
    pv.values.push_back(static_cast<double>(pv.exact.back()));
  }
  return pv;
}

// ---------------------------------------------------------------------------

/// ln(left^T A_{w1} ... A_{wn} right). A zero product is -infinity.
struct LogProductValue {
  double log_value = 0.0;
  std::size_t word_length = 0;

  bool is_zero() const { return std::isinf(log_value) && log_value < 0; }
};

inline std::vector<double> ones(std::size_t m) { return std::vector<double>(m, 1.0); }

inline std::vector<double> basis_vector(std::size_t m, std::size_t k) {
  if (k < 1 || k > m) throw ValidationError("basis index out of range");
  std::vector<double> v(m, 0.0);
  v[k - 1] = 1.0;
  return v;
}

namespace detail {

/// u <- u A_b (u a row vector), in place through a scratch buffer.
inline void advance_row(std::vector<double>& u, std::vector<double>& scratch, const IntMatrix& a) {
  const std::size_t m = a.rows();
  scratch.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double ui = u[i];
    if (ui == 0.0) continue;
    for (std::size_t j = 0; j < m; ++j)
      if (a(i, j) != 0) scratch[j] += ui * static_cast<double>(a(i, j));
  }
  u.swap(scratch);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace detail

/// Running vector is rescaled to unit 1-norm after every letter; the logs of
/// the scale factors are accumulated.
inline LogProductValue log_product(const TransitionPair& tp, const Word& word, std::span<const double> left,
                                   std::span<const double> right) {
  const std::size_t m = tp.size();
  if (left.size() != m || right.size() != m) throw ValidationError("vector length must be p+q");
  std::vector<double> u(left.begin(), left.end()), scratch;
  LogProductValue out;
  out.word_length = word.size();
  double acc = 0.0;
  for (auto b : word) {
    detail::advance_row(u, scratch, tp.A[b]);
    double s = 0.0;
    for (double x : u) s += std::abs(x);
    if (s == 0.0) {
      out.log_value = -std::numeric_limits<double>::infinity();
      return out;
    }
    acc += std::log(s);
    for (double& x : u) x /= s;
  }
  const double tail = detail::dot(u, right);
  out.log_value = tail > 0.0 ? acc + std::log(tail) : -std::numeric_limits<double>::infinity();
  return out;
}

/// Exact e_k^T A_w e, or the full row sum when k == 0.
inline BigInt exact_row_sum(const TransitionPair& tp, const Word& word, std::size_t k = 0) {
  const std::size_t m = tp.size();
  std::vector<BigInt> u(m, k == 0 ? BigInt(1) : BigInt(0));
  if (k != 0) u.at(k - 1) = 1;
  for (auto b : word) {
    std::vector<BigInt> next(m, BigInt(0));
    for (std::size_t i = 0; i < m; ++i) {
      if (u[i] == 0) continue;
      for (std::size_t j = 0; j < m; ++j)
        if (tp.A[b](i, j) != 0) next[j] += u[i] * tp.A[b](i, j);
    }
    u.swap(next);
  }
  BigInt s = 0;
  for (const auto& x : u) s += x;
  return s;
}

// ---------------------------------------------------------------------------
// Word measure

/// eta([w]) = 3^-n e A_w p.
inline double eta_weight(const TransitionPair& tp, const PerronVector& pv, const Word& word) {
  const auto lp = log_product(tp, word, ones(tp.size()), pv.values);
  return std::exp(lp.log_value - static_cast<double>(word.size()) * std::log(3.0));
}

/// eta_k([w]) = 3^-n e_k A_w p, k in 1..p+q.
inline double eta_k_weight(const TransitionPair& tp, const PerronVector& pv, std::size_t k, const Word& word) {
  const auto lp = log_product(tp, word, basis_vector(tp.size(), k), pv.values);
  return lp.is_zero() ? 0.0 : std::exp(lp.log_value - static_cast<double>(word.size()) * std::log(3.0));
}

/// Exact eta as a rational: 3^-n e A_w p.
inline Rational eta_weight_exact(const TransitionPair& tp, const PerronVector& pv, const Word& word) {
  const std::size_t m = tp.size();
  std::vector<BigInt> u(m, BigInt(1));
  for (auto b : word) {
    std::vector<BigInt> next(m, BigInt(0));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (tp.A[b](i, j) != 0) next[j] += u[i];
    u.swap(next);
  }
  Rational s = 0;
  for (std::size_t j = 0; j < m; ++j) s += Rational(u[j]) * pv.exact[j];
  return s / Rational(boost::multiprecision::pow(BigInt(3), static_cast<unsigned>(word.size())));
}

/// Sequential sampler for eta: P(next = b | prefix) = (u A_b p) / (3 u p),
/// u = e A_prefix.
class EtaSampler {
 public:
  EtaSampler(const TransitionPair& tp, const PerronVector& pv) : tp_(&tp), p_(pv.values) {
    for (unsigned b = 0; b < 2; ++b) {
      ap_[b].assign(tp.size(), 0.0);
      for (std::size_t i = 0; i < tp.size(); ++i)
        for (std::size_t j = 0; j < tp.size(); ++j) ap_[b][i] += static_cast<double>(tp.A[b](i, j)) * p_[j];
    }
  }

  /// Conditional probability of digit 0 after a prefix with (normalised) row u.
  double prob_zero(std::span<const double> u) const {
    return detail::dot(u, ap_[0]) / (3.0 * detail::dot(u, p_));
  }

  /// Draws n digits. `visit(b, s, u)` sees each digit, the scale factor that
  /// was divided out, and the normalised running row.
  template <typename Visit>
  Word draw(std::size_t n, std::mt19937_64& eng, Visit&& visit) const {
    Word w;
    w.reserve(n);
    std::vector<double> u = ones(tp_->size()), scratch;
    for (double& x : u) x /= static_cast<double>(u.size());
    for (std::size_t k = 0; k < n; ++k) {
      const std::uint8_t b = uniform01(eng) < prob_zero(u) ? 0 : 1;
      detail::advance_row(u, scratch, tp_->A[b]);
      double s = 0.0;
      for (double x : u) s += x;
      for (double& x : u) x /= s;
      w.push_back(b);
      visit(b, s, std::span<const double>(u));
    }
    return w;
  }

  Word draw(std::size_t n, std::mt19937_64& eng) const {
    return draw(n, eng, [](std::uint8_t, double, std::span<const double>) {});
  }

 private:
  const TransitionPair* tp_;
  std::vector<double> p_;
  std::array<std::vector<double>, 2> ap_;
};

inline Word sample_eta(const TransitionPair& tp, const PerronVector& pv, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw ValidationError("sample_eta needs n >= 1");
  auto eng = make_stream_engine(seed, 0);
  return EtaSampler(tp, pv).draw(n, eng);
}

}  // namespace gasket
