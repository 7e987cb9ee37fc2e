#pragma once

// Slices of the right-angle gasket by y = a + (p/q) x.
//
// An offset a in I_k is coded by k and the binary digits of
// x = q - (k-1) - q*a in [0, 1]; digit 0 selects the upper half interval.
// The number of level-n cells met by the line is e_k A_xi e for offsets in the
// interior of the level-n interval, and at least that on its boundary.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gasket/errors.hpp"
#include "gasket/exactgeom.hpp"
#include "gasket/exponents.hpp"
#include "gasket/matrixgen.hpp"
#include "gasket/measures.hpp"
#include "gasket/parallel.hpp"

namespace gasket {

struct DyadicPointRef {
  SlopeSpec slope;
  std::size_t k = 1;
  Word prefix;
  /// Repeating tail; {0} for terminating expansions (empty is read as zeros too).
  Word period;
  Rational value;

  /// x = 0.prefix(period)* in [0, 1]
  Rational expansion_value() const {
    Rational head = 0, tail = 0;
    for (auto b : prefix) head = head * 2 + b;
    head /= Rational(BigInt(1) << prefix.size());
    if (!period.empty()) {
      BigInt num = 0;
      for (auto b : period) num = num * 2 + b;
      const BigInt den = (BigInt(1) << period.size()) - 1;
      tail = Rational(num, den) / Rational(BigInt(1) << prefix.size());
    }
    return head + tail;
  }

  /// a recomputed from (k, prefix, period).
  Rational recompute() const {
    return Rational(1) - make_rational(static_cast<std::int64_t>(k) - 1, slope.q) -
           expansion_value() / Rational(slope.q);
  }

  /// First n digits of the coding.
  Word digits(std::size_t n) const {
    Word w;
    w.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (i < prefix.size())
        w.push_back(prefix[i]);
      else
        w.push_back(period.empty() ? 0 : period[(i - prefix.size()) % period.size()]);
    }
    return w;
  }

  bool all_ones_tail() const {
    return !period.empty() && std::all_of(period.begin(), period.end(), [](auto b) { return b == 1; });
  }
};

struct ExpandedPoint {
  DyadicPointRef canonical;
  /// Boundary points of the half-interval partition have a second coding.
  bool boundary = false;
  std::optional<DyadicPointRef> alternate;
};

namespace detail {

/// Eventually periodic binary digits of x in [0, 1) by long division.
inline std::pair<Word, Word> binary_expansion(const Rational& x) {
  const BigInt den = denominator(x);
  BigInt r = numerator(x);
  Word digits;
  std::map<BigInt, std::size_t> seen;
  while (!seen.count(r)) {
    seen.emplace(r, digits.size());
    r *= 2;
    if (r >= den) {
      digits.push_back(1);
      r -= den;
    } else {
      digits.push_back(0);
    }
  }
  const std::size_t start = seen.at(r);
  return {Word(digits.begin(), digits.begin() + static_cast<std::ptrdiff_t>(start)),
          Word(digits.begin() + static_cast<std::ptrdiff_t>(start), digits.end())};
}

inline bool is_dyadic(const Rational& x) {
  BigInt d = denominator(x);
  return (d & (d - 1)) == 0;
}

/// Strip trailing zeros of a terminating prefix; zero tail is written {0}.
inline DyadicPointRef make_ref(const SlopeSpec& slope, std::size_t k, Word prefix, Word period, const Rational& a) {
  if (period == Word{0})
    while (!prefix.empty() && prefix.back() == 0) prefix.pop_back();
  return DyadicPointRef{slope, k, std::move(prefix), std::move(period), a};
}

}  // namespace detail

inline ExpandedPoint expand_point(const SlopeSpec& slope, const Rational& a) {
  if (a < slope.lower_end() || a > 1)
    throw DomainError("offset " + to_string(a) + " outside [-" + to_string(slope.tan_right()) + ", 1]");
  const auto m = static_cast<std::size_t>(slope.size());
  ExpandedPoint out;
  // Largest k with a <= 1 - (k-1)/q, i.e. x = q - (k-1) - q a >= 0 and < 1
  // unless a is the left end of the whole range.
  const Rational qa = a * slope.q;
  const Rational y = Rational(slope.q) - qa;  // = (k-1) + x
  BigInt fl = numerator(y) / denominator(y);
  auto k = static_cast<std::size_t>(fl) + 1;
  Rational x = y - Rational(fl);
  if (k > m) {
    // a = -p/q: only the all-ones coding exists.
    out.canonical = detail::make_ref(slope, m, {}, {1}, a);
    return out;
  }
  auto [prefix, period] = detail::binary_expansion(x);
  out.canonical = detail::make_ref(slope, k, prefix, period, a);
  if (x == 0 && k > 1) {
    out.boundary = true;
    out.alternate = detail::make_ref(slope, k - 1, {}, {1}, a);
  } else if (x != 0 && detail::is_dyadic(x)) {
    out.boundary = true;
    Word alt = out.canonical.prefix;
    alt.back() = 0;
    out.alternate = detail::make_ref(slope, k, alt, {1}, a);
  }
  return out;
}

inline DyadicPointRef make_point_ref(const SlopeSpec& slope, std::size_t k, Word prefix, Word period) {
  if (k < 1 || k > static_cast<std::size_t>(slope.size())) throw ValidationError("interval index out of range");
  for (auto b : prefix)
    if (b > 1) throw ValidationError("digits must be 0 or 1");
  for (auto b : period)
    if (b > 1) throw ValidationError("digits must be 0 or 1");
  DyadicPointRef ref{slope, k, std::move(prefix), std::move(period), 0};
  ref.value = ref.recompute();
  return ref;
}

// ---------------------------------------------------------------------------
// Good-set counts

enum class CountMethod { Geometric, Matrix };

inline const char* to_string(CountMethod m) { return m == CountMethod::Geometric ? "geometric" : "matrix"; }

struct GoodSetCount {
  std::size_t n = 0;
  /// Exact count (absent for matrix counts beyond kMaxExactCountDepth).
  std::optional<BigInt> count;
  double log_count = 0.0;
  CountMethod method = CountMethod::Matrix;
  /// Geometric only: profile[l] = cells met at level l, l = 0..n.
  std::vector<std::uint64_t> profile;
};

inline constexpr std::size_t kMaxGeometricDepth = 20;
inline constexpr std::size_t kMaxExactCountDepth = 64;

namespace detail {

struct GeometricWalk {
  const DyadicLineKernel* kernel;
  std::size_t n;
  std::vector<std::uint64_t> profile;

  void descend(const BigInt& x, const BigInt& y, unsigned level) {
    if (!kernel->hits(x, y, level)) return;
    profile[level] += 1;
    if (level == n) return;
    const BigInt x2 = x * 2, y2 = y * 2;
    descend(x2, y2, level + 1);
    descend(x2 + 1, y2, level + 1);
    descend(x2, y2 + 1, level + 1);
  }
};

}  // namespace detail

/// Cells of level n met by the line, by descent through the cell hulls.
inline GoodSetCount good_set_count_geometric(const SlopeSpec& slope, const Rational& a, std::size_t n,
                                             unsigned threads = 1) {
  if (n > kMaxGeometricDepth)
    throw CapacityError("geometric good-set count supports n <= " + std::to_string(kMaxGeometricDepth));
  make_line(slope, a);
  const DyadicLineKernel kernel(slope, a);
  GoodSetCount out;
  out.n = n;
  out.method = CountMethod::Geometric;
  out.profile.assign(n + 1, 0);
  if (!kernel.hits(0, 0, 0)) {
    out.count = 0;
    out.log_count = -std::numeric_limits<double>::infinity();
    return out;
  }
  out.profile[0] = 1;
  if (n > 0) {
    const std::array<std::pair<int, int>, 3> roots{{{0, 0}, {1, 0}, {0, 1}}};
    std::array<std::vector<std::uint64_t>, 3> parts;
    parallel_for_index(3, threads, [&](std::size_t i) {
      detail::GeometricWalk walk{&kernel, n, std::vector<std::uint64_t>(n + 1, 0)};
      walk.descend(roots[i].first, roots[i].second, 1);
      parts[i] = std::move(walk.profile);
    });
    for (const auto& part : parts)
      for (std::size_t l = 1; l <= n; ++l) out.profile[l] += part[l];
  }
  out.count = BigInt(out.profile[n]);
  out.log_count = out.profile[n] > 0 ? std::log(static_cast<double>(out.profile[n]))
                                     : -std::numeric_limits<double>::infinity();
  return out;
}

inline constexpr std::size_t kMaxUnprunedDepth = 12;

/// Same count by testing every one of the 3^n level-n cells directly.
inline std::uint64_t good_set_count_unpruned(const SlopeSpec& slope, const Rational& a, std::size_t n) {
  if (n > kMaxUnprunedDepth)
    throw CapacityError("unpruned scan supports n <= " + std::to_string(kMaxUnprunedDepth));
  make_line(slope, a);
  const DyadicLineKernel kernel(slope, a);
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= 3;
  std::uint64_t hits = 0;
  for (std::uint64_t code = 0; code < total; ++code) {
    BigInt x = 0, y = 0;
    std::uint64_t c = code;
    std::vector<std::uint8_t> letters(n);
    for (std::size_t i = 0; i < n; ++i) {
      letters[n - 1 - i] = static_cast<std::uint8_t>(c % 3);
      c /= 3;
    }
    for (auto l : letters) {
      x *= 2;
      y *= 2;
      if (l == 1) x += 1;
      if (l == 2) y += 1;
    }
    if (kernel.hits(x, y, static_cast<unsigned>(n))) ++hits;
  }
  return hits;
}

/// e_k A_xi1 ... A_xin e from the coding.
inline GoodSetCount good_set_count_matrix(const TransitionPair& tp, const DyadicPointRef& ref, std::size_t n) {
  if (n < 1) throw ValidationError("good_set_count_matrix needs n >= 1");
  const Word xi = ref.digits(n);
  GoodSetCount out;
  out.n = n;
  out.method = CountMethod::Matrix;
  if (n <= kMaxExactCountDepth) {
    out.count = exact_row_sum(tp, xi, ref.k);
    out.log_count = std::log(static_cast<double>(*out.count));
  } else {
    out.log_count = log_product(tp, xi, basis_vector(tp.size(), ref.k), ones(tp.size())).log_value;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Interval dynamics

inline constexpr std::size_t kMaxIntervalDynamicsDepth = 16;

/// Level-|word| subinterval of I_i selected by the digits (0 = upper half).
inline ClosedInterval coded_subinterval(const IntervalPartition& part, std::size_t i, const Word& word) {
  ClosedInterval iv = part.interval(i);
  for (auto b : word) {
    const Rational mid = (iv.lo + iv.hi) / 2;
    iv = b == 0 ? ClosedInterval{mid, iv.hi} : ClosedInterval{iv.lo, mid};
  }
  return iv;
}

/// counts[i-1] = #{ternary u, |u| = |word| : f_u(I_j) = I_i^word}, by brute force.
inline std::vector<std::uint64_t> interval_dynamics_count(const SlopeSpec& slope, std::size_t j, const Word& word) {
  if (word.size() > kMaxIntervalDynamicsDepth)
    throw CapacityError("interval dynamics supports words of length <= " +
                        std::to_string(kMaxIntervalDynamicsDepth));
  const auto part = build_partition(slope);
  const std::size_t m = part.size();
  if (j < 1 || j > m) throw ValidationError("interval index out of range");
  const std::size_t n = word.size();
  // Every left endpoint at depth d is N / (q 2^d) with N an integer, so the
  // walk runs on exact int64 numerators.
  const std::int64_t q = slope.q, p = slope.p;
  auto scaled = [&](const Rational& x, std::size_t d) {
    const Rational v = x * Rational(q) * Rational(std::int64_t{1} << d);
    if (denominator(v) != 1) throw InvariantViolation("endpoint off the dyadic lattice");
    return static_cast<std::int64_t>(numerator(v));
  };
  std::map<std::int64_t, std::size_t> target_by_lo;
  for (std::size_t i = 1; i <= m; ++i) target_by_lo.emplace(scaled(coded_subinterval(part, i, word).lo, n), i);

  std::vector<std::uint64_t> counts(m, 0);
  // Images are built innermost map first; only the left endpoint is needed
  // because every image of I_j at depth n has the length of the targets.
  auto walk = [&](auto&& self, std::int64_t lo, std::size_t depth) -> void {
    if (depth == n) {
      auto it = target_by_lo.find(lo);
      if (it != target_by_lo.end()) counts[it->second - 1] += 1;
      return;
    }
    const std::int64_t unit = std::int64_t{1} << depth;
    self(self, lo, depth + 1);
    self(self, lo + q * unit, depth + 1);
    self(self, lo - p * unit, depth + 1);
  };
  walk(walk, scaled(part.interval(j).lo, 0), 0);
  return counts;
}

// ---------------------------------------------------------------------------
// Slice dimension

struct SliceDimensionEstimate {
  std::vector<std::size_t> n_list;
  /// ln(count_matrix(n)) / (n ln 2)
  std::vector<double> values;
  double liminf_proxy = 0.0;
  double limsup_proxy = 0.0;
  /// ln(spectral radius of the period product) / (|period| ln 2); a derived
  /// convention, valid when the tail product governs the growth.
  std::optional<double> periodic_limit;
};

inline double spectral_radius(const IntMatrix& m) {
  Eigen::MatrixXd a(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
        static_cast<double>(m(i, j));
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
  double r = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) r = std::max(r, std::abs(es.eigenvalues()[i]));
  return r;
}

inline SliceDimensionEstimate slice_dimension_estimate(const TransitionPair& tp, const DyadicPointRef& ref,
                                                       const std::vector<std::size_t>& n_list) {
  if (n_list.empty()) throw ValidationError("n_list must not be empty");
  SliceDimensionEstimate out;
  out.n_list = n_list;
  for (std::size_t n : n_list) {
    const auto c = good_set_count_matrix(tp, ref, n);
    out.values.push_back(c.log_count / (static_cast<double>(n) * kLog2));
  }
  const std::size_t tail = (out.values.size() + 1) / 2;
  const auto first = out.values.end() - static_cast<std::ptrdiff_t>(tail);
  out.liminf_proxy = *std::min_element(first, out.values.end());
  out.limsup_proxy = *std::max_element(first, out.values.end());
  if (!ref.period.empty()) {
    const IntMatrix prod = word_product(tp, ref.period);
    const double rho = spectral_radius(prod);
    out.periodic_limit = rho > 0 ? std::log(rho) / (static_cast<double>(ref.period.size()) * kLog2) : 0.0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dimension conservation

struct ConservationResult {
  std::size_t n = 0;
  double local_dim = 0.0;
  double box_dim = 0.0;
  double deviation = 0.0;
  /// (ln(1/p_min) + ln(p+q)) / (n ln 2)
  double envelope = 0.0;
  bool degenerate = false;
};

inline ConservationResult conservation_check(const TransitionPair& tp, const PerronVector& pv,
                                             const DyadicPointRef& ref, std::size_t n) {
  if (n < 1) throw ValidationError("conservation_check needs n >= 1");
  const Word xi = ref.digits(n);
  const auto ek = basis_vector(tp.size(), ref.k);
  const auto ep = log_product(tp, xi, ek, pv.values);
  const auto ee = log_product(tp, xi, ek, ones(tp.size()));
  ConservationResult out;
  out.n = n;
  const double scale = static_cast<double>(n) * kLog2;
  out.envelope = (std::log(1.0 / pv.min_entry()) + std::log(static_cast<double>(tp.size()))) / scale;
  if (ep.is_zero() || ee.is_zero()) {
    out.degenerate = true;
    return out;
  }
  out.local_dim = (static_cast<double>(n) * kLog3 - ep.log_value) / scale;
  out.box_dim = ee.log_value / scale;
  out.deviation = out.local_dim + out.box_dim - kGasketDim;
  return out;
}

inline ConservationResult conservation_check(const TransitionPair& tp, const DyadicPointRef& ref, std::size_t n) {
  return conservation_check(tp, perron_vector(tp), ref, n);
}

}  // namespace gasket
