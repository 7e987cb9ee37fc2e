#include <gtest/gtest.h>

#include <numeric>

#include "gasket/exponents.hpp"
#include "gasket/matrixgen.hpp"

using namespace gasket;

namespace {

IntMatrix from_rows(const std::vector<std::string>& rows) {
  IntMatrix m(rows.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j] - '0';
  return m;
}

std::vector<SlopeSpec> slopes_up_to(std::int64_t max_sum) {
  std::vector<SlopeSpec> out;
  for (std::int64_t t = 2; t <= max_sum; ++t)
    for (std::int64_t p = 1; p < t; ++p)
      if (std::gcd(p, t - p) == 1) out.push_back(make_slope(p, t - p));
  return out;
}

const IntMatrix kA0_23 = from_rows({"10000", "00100", "01001", "01010", "00010"});
const IntMatrix kA1_23 = from_rows({"01000", "10010", "10100", "00101", "00001"});

}  // namespace

TEST(Partition, TwoThirds) {
  const auto part = build_partition(make_slope(2, 3));
  ASSERT_EQ(part.size(), 5u);
  EXPECT_EQ(part.interval(1).hi, make_rational(1));
  EXPECT_EQ(part.interval(5).lo, make_rational(-2, 3));
  for (std::size_t k = 1; k <= 5; ++k) {
    EXPECT_EQ(part.interval(k).length(), make_rational(1, 3));
    if (k > 1) EXPECT_EQ(part.interval(k).hi, part.interval(k - 1).lo);
    EXPECT_EQ(part.half(k, 0).hi, part.interval(k).hi);
    EXPECT_EQ(part.half(k, 1).lo, part.interval(k).lo);
    EXPECT_EQ(part.half(k, 0).lo, part.half(k, 1).hi);
    EXPECT_EQ(part.half(k, 0).length(), make_rational(1, 6));
  }
}

TEST(Partition, UnitSlope) {
  const auto part = build_partition(make_slope(1, 1));
  ASSERT_EQ(part.size(), 2u);
  EXPECT_EQ(part.interval(1), (ClosedInterval{0, 1}));
  EXPECT_EQ(part.interval(2), (ClosedInterval{-1, 0}));
}

TEST(Partition, TilesProjection) {
  for (const auto& s : slopes_up_to(12)) {
    const auto part = build_partition(s);
    EXPECT_EQ(part.interval(1).hi, Rational(1));
    EXPECT_EQ(part.interval(part.size()).lo, s.lower_end());
  }
}

TEST(Builders, TwoThirdsMatchesDisplayedMatrices) {
  for (const auto& tp : {build_matrices_geometric(make_slope(2, 3)), build_matrices_congruence(make_slope(2, 3))}) {
    EXPECT_EQ(tp.A[0], kA0_23);
    EXPECT_EQ(tp.A[1], kA1_23);
  }
}

TEST(Builders, UnitSlope) {
  const IntMatrix a0 = from_rows({"10", "11"}), a1 = from_rows({"11", "01"});
  for (const auto& tp : {build_matrices_geometric(make_slope(1, 1)), build_matrices_congruence(make_slope(1, 1))}) {
    EXPECT_EQ(tp.A[0], a0);
    EXPECT_EQ(tp.A[1], a1);
  }
}

TEST(Builders, AgreeForAllSmallSlopes) {
  for (const auto& s : slopes_up_to(12)) {
    const auto g = build_matrices_geometric(s);
    const auto c = build_matrices_congruence(s);
    EXPECT_EQ(g, c) << s.str();
    EXPECT_EQ(g.size(), static_cast<std::size_t>(s.size()));
  }
}

TEST(Validation, LemmasHold) {
  for (const auto& s : slopes_up_to(12)) {
    const auto rep = validate_structure(build_matrices_congruence(s));
    EXPECT_TRUE(rep.ok()) << s.str() << ": " << (rep.ok() ? "" : rep.violations.front());
  }
}

TEST(Validation, ZeroColumnDetected) {
  IntMatrix a0 = kA0_23;
  for (std::size_t i = 0; i < 5; ++i) a0(i, 2) = 0;
  const auto rep = validate_structure(make_transition_pair(make_slope(2, 3), a0, kA1_23));
  ASSERT_FALSE(rep.ok());
  bool found = false;
  for (const auto& v : rep.violations) found = found || v.find("(a) A0 column 3") != std::string::npos;
  EXPECT_TRUE(found);
}

TEST(Validation, UnitSlopeMatching) {
  const auto tp = build_matrices_congruence(make_slope(1, 1));
  const auto match = column_matching(tp.A[0]);
  ASSERT_TRUE(match.has_value());
  EXPECT_EQ((*match)[0], 0u);
  EXPECT_EQ((*match)[1], 1u);
}

TEST(Validation, WrongShapeRejected) {
  EXPECT_THROW(make_transition_pair(make_slope(1, 1), IntMatrix(3, 3), IntMatrix(3, 3)), ValidationError);
}

TEST(Primitive, UnitSlope) {
  const auto cert = find_primitive_word(build_matrices_congruence(make_slope(1, 1)));
  EXPECT_EQ(cert.n0, 2u);
  EXPECT_GE(cert.product_min_entry, 1);
  const auto prod = word_product(build_matrices_congruence(make_slope(1, 1)), Word{0, 1});
  EXPECT_EQ(prod, from_rows({"11", "12"}));
}

TEST(Primitive, WithinBoundForAllSmallSlopes) {
  for (const auto& s : slopes_up_to(12)) {
    const auto tp = build_matrices_congruence(s);
    const auto cert = find_primitive_word(tp);
    EXPECT_LE(cert.n0, primitive_length_bound(tp.size())) << s.str();
    EXPECT_GE(word_product(tp, cert.word).min_entry(), 1);
  }
  EXPECT_EQ(primitive_length_bound(5), 21u);
}

TEST(Primitive, ShortestWord) {
  // Brute force over all words up to the certificate length.
  for (const auto& s : slopes_up_to(7)) {
    const auto tp = build_matrices_congruence(s);
    const auto cert = find_primitive_word(tp);
    for (std::size_t len = 1; len < cert.n0; ++len)
      for (std::uint64_t code = 0; code < (std::uint64_t{1} << len); ++code)
        EXPECT_EQ(word_product(tp, word_from_code(code, len)).min_entry(), 0) << s.str();
  }
}

TEST(Degenerate, UnitSlopeCounts) {
  const auto tp = build_matrices_congruence(make_slope(1, 1));
  EXPECT_EQ(count_degenerate_words(tp, 1), 2u);
  EXPECT_EQ(count_degenerate_words(tp, 2), 2u);
}

TEST(Degenerate, MatchesBruteForceAndBound) {
  for (const auto& s : slopes_up_to(6)) {
    const auto tp = build_matrices_congruence(s);
    for (std::size_t n = 1; n <= 10; ++n) {
      std::uint64_t brute = 0;
      for (std::uint64_t code = 0; code < (std::uint64_t{1} << n); ++code)
        if (word_product(tp, word_from_code(code, n)).min_entry() == 0) ++brute;
      const auto fast = count_degenerate_words(tp, n);
      EXPECT_EQ(fast, brute) << s.str() << " n=" << n;
      EXPECT_LE(BigInt(fast), degenerate_word_bound(tp.size(), n));
      EXPECT_LE(fast, std::uint64_t{1} << n);
    }
  }
}

TEST(Degenerate, FractionDecays) {
  for (const auto& s : slopes_up_to(6)) {
    const auto tp = build_matrices_congruence(s);
    double prev = 1.0;
    for (std::size_t n = 1; n <= 18; ++n) {
      const double frac = static_cast<double>(count_degenerate_words(tp, n)) / std::ldexp(1.0, static_cast<int>(n));
      EXPECT_LE(frac, prev + 1e-15) << s.str() << " n=" << n;
      prev = frac;
    }
    EXPECT_LT(prev, 0.5);
  }
}

TEST(Degenerate, CapacityLimit) {
  EXPECT_THROW(count_degenerate_words(build_matrices_congruence(make_slope(1, 1)), 41), CapacityError);
}

TEST(ZeroPatternTest, MonotoneUnderMultiplication) {
  for (const auto& s : slopes_up_to(8)) {
    const auto tp = build_matrices_congruence(s);
    const std::array<ZeroPattern, 2> letters{ZeroPattern(tp.A[0]), ZeroPattern(tp.A[1])};
    for (std::uint64_t code = 0; code < 64; ++code) {
      const ZeroPattern w(word_product(tp, word_from_code(code, 6)));
      for (unsigned b = 0; b < 2; ++b) {
        const auto left = letters[b].times(w);   // A_b * B
        const auto right = w.times(letters[b]);  // B * A_b
        EXPECT_EQ(left, ZeroPattern(tp.A[b] * word_product(tp, word_from_code(code, 6))));
        for (std::size_t j = 0; j < tp.size(); ++j) EXPECT_LE(left.zeros_in_col(j), w.zeros_in_col(j));
        for (std::size_t i = 0; i < tp.size(); ++i) EXPECT_LE(right.zeros_in_row(i), w.zeros_in_row(i));
      }
    }
  }
}

TEST(Words, StringRoundTrip) {
  EXPECT_EQ(word_to_string(Word{0, 1, 1}), "011");
  EXPECT_EQ(word_from_string("0110"), (Word{0, 1, 1, 0}));
  EXPECT_THROW(word_from_string("012"), ValidationError);
}
