#pragma once

// Transition matrices A_0, A_1 of the projected IFS
//   f0(t) = t/2,  f1(t) = t/2 + 1/2,  f2(t) = t/2 - p/(2q)
// on the partition of [-p/q, 1] into the p+q intervals
//   I_k = [1 - k/q, 1 - (k-1)/q],  k = 1..p+q.
//
// Indices: the API and all reports use 1-based interval numbers k; matrix
// storage is 0-based, so I_k is row/column k-1.
//
// Half intervals follow the offset coding a = 1 - (k-1)/q - (1/q) sum xi_i 2^-i:
// digit 0 selects the upper half of I_k, digit 1 the lower half.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "gasket/errors.hpp"
#include "gasket/exactgeom.hpp"
#include "gasket/matrix.hpp"

namespace gasket {

using Word = std::vector<std::uint8_t>;

inline std::string word_to_string(const Word& w) {
  std::string s;
  s.reserve(w.size());
  for (auto b : w) s.push_back(static_cast<char>('0' + b));
  return s;
}

inline Word word_from_string(const std::string& s) {
  Word w;
  w.reserve(s.size());
  for (char c : s) {
    if (c != '0' && c != '1') throw ValidationError("binary word expected, got '" + s + "'");
    w.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return w;
}

struct ClosedInterval {
  Rational lo;
  Rational hi;
  friend bool operator==(const ClosedInterval&, const ClosedInterval&) = default;
  Rational length() const { return hi - lo; }
  bool contains(const Rational& x) const { return lo <= x && x <= hi; }
};

struct IntervalPartition {
  SlopeSpec slope;
  /// intervals[k-1] = I_k
  std::vector<ClosedInterval> intervals;
  /// halves[k-1][digit] = I_k^digit (digit 0 = upper half)
  std::vector<std::array<ClosedInterval, 2>> halves;

  std::size_t size() const { return intervals.size(); }
  const ClosedInterval& interval(std::size_t k) const { return intervals.at(k - 1); }
  const ClosedInterval& half(std::size_t k, unsigned digit) const { return halves.at(k - 1).at(digit); }
};

inline IntervalPartition build_partition(const SlopeSpec& slope) {
  IntervalPartition part;
  part.slope = slope;
  const auto m = static_cast<std::size_t>(slope.size());
  part.intervals.reserve(m);
  part.halves.reserve(m);
  const Rational one{1};
  for (std::size_t k = 1; k <= m; ++k) {
    ClosedInterval ik{one - make_rational(static_cast<std::int64_t>(k), slope.q),
                      one - make_rational(static_cast<std::int64_t>(k) - 1, slope.q)};
    const Rational mid = (ik.lo + ik.hi) / 2;
    part.halves.push_back({ClosedInterval{mid, ik.hi}, ClosedInterval{ik.lo, mid}});
    part.intervals.push_back(std::move(ik));
  }
  return part;
}

struct TransitionPair {
  SlopeSpec slope;
  std::array<IntMatrix, 2> A;
  IntervalPartition partition;

  std::size_t size() const { return A[0].rows(); }
  const IntMatrix& operator[](unsigned digit) const { return A[digit]; }

  friend bool operator==(const TransitionPair& a, const TransitionPair& b) {
    return a.slope == b.slope && a.A == b.A;
  }
};

/// The three projected maps applied to an interval, in the order f0, f1, f2.
inline std::array<ClosedInterval, 3> projected_images(const SlopeSpec& slope, const ClosedInterval& iv) {
  const Rational half = make_rational(1, 2);
  const Rational shift2 = make_rational(slope.p, 2 * slope.q);
  return {ClosedInterval{iv.lo / 2, iv.hi / 2}, ClosedInterval{iv.lo / 2 + half, iv.hi / 2 + half},
          ClosedInterval{iv.lo / 2 - shift2, iv.hi / 2 - shift2}};
}

/// (A_n)_{i,j} = #{ maps f with f(I_j) = I_i^n }, by exact interval comparison.
inline TransitionPair build_matrices_geometric(const SlopeSpec& slope) {
  TransitionPair tp;
  tp.slope = slope;
  tp.partition = build_partition(slope);
  const std::size_t m = tp.partition.size();
  tp.A = {IntMatrix(m, m), IntMatrix(m, m)};
  for (std::size_t j = 1; j <= m; ++j) {
    for (const ClosedInterval& img : projected_images(slope, tp.partition.interval(j))) {
      bool placed = false;
      for (std::size_t i = 1; i <= m && !placed; ++i)
        for (unsigned n = 0; n < 2 && !placed; ++n)
          if (tp.partition.half(i, n) == img) {
            tp.A[n](i - 1, j - 1) += 1;
            placed = true;
          }
      if (!placed)
        throw InvariantViolation("image [" + to_string(img.lo) + ", " + to_string(img.hi) + "] of I_" +
                                 std::to_string(j) + " is not a half interval");
    }
  }
  return tp;
}

/// Closed form: (A_n)_{i,j} = 1 iff 2i-1+n == j (mod p+q), or
/// 2q+p >= 2i+n-1 >= q+1 and 2i-1+n-q == j (mod p+q). Residues in {1..p+q}.
inline TransitionPair build_matrices_congruence(const SlopeSpec& slope) {
  TransitionPair tp;
  tp.slope = slope;
  tp.partition = build_partition(slope);
  const std::int64_t m = slope.size();
  const std::int64_t p = slope.p, q = slope.q;
  auto residue = [m](std::int64_t x) { return ((x - 1) % m + m) % m + 1; };
  tp.A = {IntMatrix(m, m), IntMatrix(m, m)};
  for (std::int64_t n = 0; n < 2; ++n)
    for (std::int64_t i = 1; i <= m; ++i) {
      const std::int64_t first = residue(2 * i - 1 + n);
      tp.A[n](i - 1, first - 1) = 1;
      const std::int64_t h = 2 * i + n - 1;
      if (2 * q + p >= h && h >= q + 1) tp.A[n](i - 1, residue(2 * i - 1 + n - q) - 1) = 1;
    }
  return tp;
}

/// Wraps externally supplied matrices (e.g. for validating a hand-edited pair).
inline TransitionPair make_transition_pair(const SlopeSpec& slope, IntMatrix a0, IntMatrix a1) {
  const auto m = static_cast<std::size_t>(slope.size());
  if (a0.rows() != m || a0.cols() != m || a1.rows() != m || a1.cols() != m)
    throw ValidationError("matrices must be (p+q)x(p+q)");
  TransitionPair tp;
  tp.slope = slope;
  tp.partition = build_partition(slope);
  tp.A = {std::move(a0), std::move(a1)};
  return tp;
}

// ---------------------------------------------------------------------------
// Structural checks

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Column-perfect matching in the 0/1 support of m (Kuhn's algorithm).
/// Returns row_of_col[j] or nullopt.
inline std::optional<std::vector<std::size_t>> column_matching(const IntMatrix& m) {
  const std::size_t n = m.rows();
  std::vector<std::size_t> col_of_row(n, n);
  std::vector<char> seen;
  auto augment = [&](auto&& self, std::size_t col) -> bool {
    for (std::size_t r = 0; r < n; ++r) {
      if (m(r, col) == 0 || seen[r]) continue;
      seen[r] = 1;
      if (col_of_row[r] == n || self(self, col_of_row[r])) {
        col_of_row[r] = col;
        return true;
      }
    }
    return false;
  };
  for (std::size_t c = 0; c < m.cols(); ++c) {
    seen.assign(n, 0);
    if (!augment(augment, c)) return std::nullopt;
  }
  std::vector<std::size_t> row_of_col(m.cols(), n);
  for (std::size_t r = 0; r < n; ++r)
    if (col_of_row[r] != n) row_of_col[col_of_row[r]] = r;
  return row_of_col;
}

inline ValidationReport validate_structure(const TransitionPair& tp) {
  ValidationReport rep;
  const std::size_t m = tp.size();
  for (unsigned n = 0; n < 2; ++n) {
    const IntMatrix& a = tp.A[n];
    if (a.rows() != m || a.cols() != m) {
      rep.violations.push_back("A" + std::to_string(n) + " is not square of size p+q");
      return rep;
    }
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (a(i, j) != 0 && a(i, j) != 1)
          rep.violations.push_back("A" + std::to_string(n) + " entry (" + std::to_string(i + 1) + "," +
                                   std::to_string(j + 1) + ") is not 0/1");
    for (std::size_t k = 0; k < m; ++k) {
      std::int64_t rs = 0, cs = 0;
      for (std::size_t l = 0; l < m; ++l) {
        rs += a(k, l);
        cs += a(l, k);
      }
      if (rs < 1 || rs > 2)
        rep.violations.push_back("(a) A" + std::to_string(n) + " row " + std::to_string(k + 1) + " has " +
                                 std::to_string(rs) + " ones");
      if (cs < 1 || cs > 2)
        rep.violations.push_back("(a) A" + std::to_string(n) + " column " + std::to_string(k + 1) + " has " +
                                 std::to_string(cs) + " ones");
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    std::int64_t cs = 0;
    for (std::size_t i = 0; i < m; ++i) cs += tp.A[0](i, j) + tp.A[1](i, j);
    if (cs != 3)
      rep.violations.push_back("(b) column " + std::to_string(j + 1) + " of A0+A1 sums to " + std::to_string(cs));
  }
  for (unsigned n = 0; n < 2; ++n)
    if (!column_matching(tp.A[n]))
      rep.violations.push_back("(c) A" + std::to_string(n) + " has no column-covering permutation submatrix");
  return rep;
}

// ---------------------------------------------------------------------------
// Zero patterns

/// Support of a product, one bitmask per row (bit j set iff entry (i, j) > 0).
/// Limited to p+q <= 64.
class ZeroPattern {
 public:
  ZeroPattern() = default;
  explicit ZeroPattern(const IntMatrix& m) : rows_(m.rows(), 0), cols_(m.cols()) {
    if (m.cols() > 64) throw CapacityError("zero patterns support at most 64 columns");
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j)
        if (m(i, j) != 0) rows_[i] |= std::uint64_t{1} << j;
  }
  static ZeroPattern identity(std::size_t n) {
    ZeroPattern z;
    z.cols_ = n;
    z.rows_.resize(n);
    for (std::size_t i = 0; i < n; ++i) z.rows_[i] = std::uint64_t{1} << i;
    return z;
  }

  /// Pattern of (this * rhs).
  ZeroPattern times(const ZeroPattern& rhs) const {
    ZeroPattern out;
    out.cols_ = rhs.cols_;
    out.rows_.assign(rows_.size(), 0);
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      std::uint64_t bits = rows_[i];
      while (bits) {
        const int k = std::countr_zero(bits);
        bits &= bits - 1;
        out.rows_[i] |= rhs.rows_[static_cast<std::size_t>(k)];
      }
    }
    return out;
  }

  bool positive() const {
    const std::uint64_t full = cols_ == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << cols_) - 1);
    return std::all_of(rows_.begin(), rows_.end(), [full](std::uint64_t r) { return r == full; });
  }
  std::size_t zeros_in_row(std::size_t i) const {
    return cols_ - static_cast<std::size_t>(std::popcount(rows_[i]));
  }
  std::size_t zeros_in_col(std::size_t j) const {
    std::size_t z = 0;
    for (auto r : rows_)
      if (!(r >> j & 1U)) ++z;
    return z;
  }
  std::size_t total_zeros() const {
    std::size_t z = 0;
    for (std::size_t i = 0; i < rows_.size(); ++i) z += zeros_in_row(i);
    return z;
  }
  const std::vector<std::uint64_t>& rows() const { return rows_; }
  friend bool operator==(const ZeroPattern&, const ZeroPattern&) = default;

 private:
  std::vector<std::uint64_t> rows_;
  std::size_t cols_ = 0;
};

/// Exact product A_{w1} ... A_{wn} (identity for the empty word).
template <typename T = std::int64_t>
Matrix<T> word_product(const TransitionPair& tp, const Word& w) {
  Matrix<T> out = Matrix<T>::identity(tp.size());
  for (auto b : w) out = out * tp.A[b].template cast<T>();
  return out;
}

struct PrimitivityCertificate {
  Word word;
  std::size_t n0 = 0;
  std::int64_t product_min_entry = 0;
  std::size_t length_bound = 0;
};

/// (p+q)(p+q-1) + 1
inline std::size_t primitive_length_bound(std::size_t m) { return m * (m - 1) + 1; }

/// Shortest word whose product is entrywise positive, by breadth-first search
/// over zero patterns.
inline PrimitivityCertificate find_primitive_word(const TransitionPair& tp) {
  const std::size_t m = tp.size();
  const std::size_t bound = primitive_length_bound(m);
  const std::array<ZeroPattern, 2> letters{ZeroPattern(tp.A[0]), ZeroPattern(tp.A[1])};

  struct Node {
    ZeroPattern pattern;
    std::size_t parent;
    std::uint8_t letter;
    std::size_t depth;
  };
  struct PatternHash {
    std::size_t operator()(const std::vector<std::uint64_t>& rows) const {
      std::size_t h = 1469598103934665603ULL;
      for (auto r : rows) h = (h ^ std::hash<std::uint64_t>{}(r)) * 1099511628211ULL;
      return h;
    }
  };
  std::vector<Node> nodes;
  std::unordered_map<std::vector<std::uint64_t>, std::size_t, PatternHash> seen;
  std::deque<std::size_t> queue;
  const auto none = static_cast<std::size_t>(-1);
  nodes.push_back({ZeroPattern::identity(m), none, 0, 0});
  seen.emplace(nodes.back().pattern.rows(), 0);
  queue.push_back(0);
  while (!queue.empty()) {
    const std::size_t cur = queue.front();
    queue.pop_front();
    if (nodes[cur].depth >= bound) continue;
    for (std::uint8_t b = 0; b < 2; ++b) {
      ZeroPattern next = nodes[cur].pattern.times(letters[b]);
      if (seen.contains(next.rows())) continue;
      const bool done = next.positive();
      seen.emplace(next.rows(), nodes.size());
      nodes.push_back({std::move(next), cur, b, nodes[cur].depth + 1});
      if (done) {
        PrimitivityCertificate cert;
        for (std::size_t at = nodes.size() - 1; at != 0; at = nodes[at].parent)
          cert.word.push_back(nodes[at].letter);
        std::reverse(cert.word.begin(), cert.word.end());
        cert.n0 = cert.word.size();
        cert.length_bound = bound;
        cert.product_min_entry = word_product(tp, cert.word).min_entry();
        if (cert.product_min_entry < 1) throw InvariantViolation("pattern search disagrees with product");
        return cert;
      }
      queue.push_back(nodes.size() - 1);
    }
  }
  throw InvariantViolation("no positive product of length <= " + std::to_string(bound) + " for p/q = " +
                           std::to_string(tp.slope.p) + "/" + std::to_string(tp.slope.q));
}

/// Right-hand side of the degenerate-word bound: sum_{l=0}^{m(m-1)-1} C(n,l) 2^l.
inline BigInt degenerate_word_bound(std::size_t m, std::size_t n) {
  const std::size_t top = m * (m - 1) - 1;
  BigInt total = 0, binom = 1, pow2 = 1;
  for (std::size_t l = 0; l <= top && l <= n; ++l) {
    total += binom * pow2;
    binom = binom * (n - l) / (l + 1);
    pow2 *= 2;
  }
  return total;
}

inline constexpr std::size_t kMaxDegenerateDepth = 40;

/// Number of binary words of length n whose product has a zero entry.
/// Subtrees below a positive prefix are counted without descending.
inline std::uint64_t count_degenerate_words(const TransitionPair& tp, std::size_t n) {
  if (n < 1) throw ValidationError("count_degenerate_words needs n >= 1");
  if (n > kMaxDegenerateDepth) throw CapacityError("count_degenerate_words supports n <= 40");
  const std::array<ZeroPattern, 2> letters{ZeroPattern(tp.A[0]), ZeroPattern(tp.A[1])};
  auto walk = [&](auto&& self, const ZeroPattern& pat, std::size_t depth) -> std::uint64_t {
    if (pat.positive()) return 0;
    if (depth == n) return 1;
    return self(self, pat.times(letters[0]), depth + 1) + self(self, pat.times(letters[1]), depth + 1);
  };
  return walk(walk, ZeroPattern::identity(tp.size()), 0);
}

}  // namespace gasket
