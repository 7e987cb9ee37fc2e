#pragma once

// Exact arithmetic for the right-angle gasket and lines of rational slope.
//
// The right-angle gasket is the attractor of
//   F0(x,y) = (x/2, y/2), F1(x,y) = (x/2 + 1/2, y/2), F2(x,y) = (x/2, y/2 + 1/2).
// A line of slope p/q is written y = a + (p/q) x; its offset a ranges over
// the projection [-p/q, 1].

#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "gasket/errors.hpp"

namespace gasket {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
  if (den == 0) throw ValidationError("zero denominator");
  return Rational(BigInt(num), BigInt(den));
}

inline std::string to_string(const Rational& r) { return r.str(); }

/// Parses "n", "-n", "n/d". Whitespace is not accepted.
inline Rational parse_rational(const std::string& text) {
  auto parse_int = [&](const std::string& s) -> BigInt {
    if (s.empty()) throw ValidationError("malformed rational: '" + text + "'");
    std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (start == s.size()) throw ValidationError("malformed rational: '" + text + "'");
    for (std::size_t i = start; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9') throw ValidationError("malformed rational: '" + text + "'");
    return BigInt(s);
  };
  auto slash = text.find('/');
  if (slash == std::string::npos) return Rational(parse_int(text));
  BigInt den = parse_int(text.substr(slash + 1));
  if (den == 0) throw ValidationError("zero denominator in '" + text + "'");
  return Rational(parse_int(text.substr(0, slash)), den);
}

// ---------------------------------------------------------------------------
// Slopes

/// A reduced rational slope p/q of the right-angle gasket together with the
/// matching tangent sqrt(3) * p / (2q + p) of the equilateral gasket.
struct SlopeSpec {
  std::int64_t p = 1;
  std::int64_t q = 1;
  /// True when the input had to be divided by gcd(p, q).
  bool reduced = false;
  std::int64_t input_p = 1;
  std::int64_t input_q = 1;
  /// p / (2q + p) in lowest terms; the gasket tangent is sqrt(3) * num / den.
  std::int64_t gasket_num = 1;
  std::int64_t gasket_den = 3;
  /// The "m odd implies n odd" membership test on gasket_num/gasket_den.
  /// Fails for even p (e.g. p/q = 2/1 gives sqrt(3)/2); reported, not enforced.
  bool q_prime_condition = true;

  std::int64_t size() const { return p + q; }
  Rational tan_right() const { return make_rational(p, q); }
  /// Unreduced coefficient pair (p, 2q + p).
  std::pair<std::int64_t, std::int64_t> tan_gasket_coeffs() const { return {p, 2 * q + p}; }
  double tan_gasket_value() const {
    return std::sqrt(3.0) * static_cast<double>(gasket_num) / static_cast<double>(gasket_den);
  }
  Rational lower_end() const { return -tan_right(); }
  std::string str() const { return std::to_string(p) + "/" + std::to_string(q); }

  friend bool operator==(const SlopeSpec& a, const SlopeSpec& b) { return a.p == b.p && a.q == b.q; }
};

inline SlopeSpec make_slope(std::int64_t p, std::int64_t q) {
  if (p < 1 || q < 1)
    throw ValidationError("slope p/q needs p >= 1 and q >= 1, got " + std::to_string(p) + "/" +
                          std::to_string(q));
  SlopeSpec s;
  s.input_p = p;
  s.input_q = q;
  const std::int64_t g = std::gcd(p, q);
  s.p = p / g;
  s.q = q / g;
  s.reduced = g != 1;
  const std::int64_t num = s.p;
  const std::int64_t den = 2 * s.q + s.p;
  const std::int64_t h = std::gcd(num, den);
  s.gasket_num = num / h;
  s.gasket_den = den / h;
  s.q_prime_condition = (s.gasket_num % 2 == 0) || (s.gasket_den % 2 == 1);
  if (!(s.gasket_num < s.gasket_den))
    throw InvariantViolation("gasket tangent not below sqrt(3)");
  return s;
}

/// Inverts tan = sqrt(3) * m / n back to a right-angle slope p/q.
/// Needs 0 < m/n < 1.
inline SlopeSpec slope_from_gasket_tan(std::int64_t m, std::int64_t n) {
  if (m < 1 || n < 1) throw ValidationError("gasket tangent sqrt(3)*m/n needs m, n >= 1");
  const std::int64_t g = std::gcd(m, n);
  m /= g;
  n /= g;
  if (m >= n) throw ValidationError("gasket tangent sqrt(3)*m/n must lie below sqrt(3)");
  // m/n = p/(2q+p)
  if ((n - m) % 2 == 0) return make_slope(m, (n - m) / 2);
  return make_slope(2 * m, n - m);
}

// ---------------------------------------------------------------------------
// Numbers a + b*sqrt(3)

struct Surd {
  Rational a{0};
  Rational b{0};

  friend Surd operator+(const Surd& x, const Surd& y) { return {x.a + y.a, x.b + y.b}; }
  friend Surd operator-(const Surd& x, const Surd& y) { return {x.a - y.a, x.b - y.b}; }
  friend Surd operator-(const Surd& x) { return {-x.a, -x.b}; }
  friend Surd operator*(const Surd& x, const Surd& y) {
    return {x.a * y.a + 3 * x.b * y.b, x.a * y.b + x.b * y.a};
  }
  friend bool operator==(const Surd& x, const Surd& y) { return x.a == y.a && x.b == y.b; }
  double value() const {
    return static_cast<double>(a) + static_cast<double>(b) * std::sqrt(3.0);
  }
};

struct SurdPoint {
  Surd x;
  Surd y;
  friend bool operator==(const SurdPoint&, const SurdPoint&) = default;
};

/// T = [[1, -sqrt(3)/3], [0, 2 sqrt(3)/3]] maps the equilateral gasket onto
/// the right-angle one.
inline SurdPoint transform_T(const SurdPoint& pt) {
  const Surd m01{0, make_rational(-1, 3)};
  const Surd m11{0, make_rational(2, 3)};
  return {pt.x + m01 * pt.y, m11 * pt.y};
}

/// T^-1 = [[1, 1/2], [0, sqrt(3)/2]].
inline SurdPoint inverse_transform_T(const SurdPoint& pt) {
  const Surd m01{make_rational(1, 2), 0};
  const Surd m11{0, make_rational(1, 2)};
  return {pt.x + m01 * pt.y, m11 * pt.y};
}

// ---------------------------------------------------------------------------
// Points, cells, lines

struct ExactPoint {
  Rational x{0};
  Rational y{0};
  friend bool operator==(const ExactPoint&, const ExactPoint&) = default;
};

/// Convex hull of a level-n cylinder: corner, corner + (2^-n, 0), corner + (0, 2^-n).
struct TriangleCell {
  std::array<ExactPoint, 3> vertices;
  std::vector<std::uint8_t> word;

  std::size_t level() const { return word.size(); }
};

/// Cell F_{w1} o ... o F_{wn}(unit triangle). Letters must be 0, 1 or 2.
inline TriangleCell make_cell(const std::vector<std::uint8_t>& word) {
  Rational cx{0}, cy{0}, side{1};
  for (std::uint8_t letter : word) {
    if (letter > 2) throw ValidationError("cell words are ternary");
    side /= 2;
    if (letter == 1) cx += side;
    if (letter == 2) cy += side;
  }
  TriangleCell cell;
  cell.word = word;
  cell.vertices = {ExactPoint{cx, cy}, ExactPoint{cx + side, cy}, ExactPoint{cx, cy + side}};
  return cell;
}

struct RationalLine {
  Rational slope{1};
  Rational intercept{0};
};

/// The line y = a + (p/q) x for the given slope; a must lie in [-p/q, 1].
inline RationalLine make_line(const SlopeSpec& slope, const Rational& a) {
  if (a < slope.lower_end() || a > 1)
    throw DomainError("offset " + to_string(a) + " outside [-" + to_string(slope.tan_right()) +
                      ", 1]");
  return RationalLine{slope.tan_right(), a};
}

/// Sign of y - a - slope*x at pt: -1, 0 or +1.
inline int side_of(const RationalLine& line, const ExactPoint& pt) {
  const Rational v = pt.y - line.intercept - line.slope * pt.x;
  return v.sign();
}

/// Closed line against closed triangle: they meet unless all three vertices
/// lie strictly on the same side.
inline bool line_hits_triangle(const RationalLine& line, const TriangleCell& cell) {
  const int s0 = side_of(line, cell.vertices[0]);
  const int s1 = side_of(line, cell.vertices[1]);
  const int s2 = side_of(line, cell.vertices[2]);
  return !((s0 > 0 && s1 > 0 && s2 > 0) || (s0 < 0 && s1 < 0 && s2 < 0));
}

/// Integer form of side_of for dyadic cells, used by the descent in the
/// slicer. With a = N/D and a corner (X, Y) / 2^n the affine form scaled by
/// q*D*2^n is q*D*Y - p*D*X - q*N*2^n.
class DyadicLineKernel {
 public:
  DyadicLineKernel(const SlopeSpec& slope, const Rational& a)
      : qd_(BigInt(slope.q) * denominator(a)),
        pd_(BigInt(slope.p) * denominator(a)),
        qn_(BigInt(slope.q) * numerator(a)) {}

  /// Whether the level-n cell with corner (X, Y)/2^n meets the line.
  bool hits(const BigInt& x, const BigInt& y, unsigned level) const {
    const BigInt scale = BigInt(1) << level;
    const BigInt base = qd_ * y - pd_ * x - qn_ * scale;
    const int s0 = base.sign();
    const int s1 = BigInt(base - pd_).sign();
    const int s2 = BigInt(base + qd_).sign();
    return !((s0 > 0 && s1 > 0 && s2 > 0) || (s0 < 0 && s1 < 0 && s2 < 0));
  }

 private:
  BigInt qd_;
  BigInt pd_;
  BigInt qn_;
};

}  // namespace gasket
