#include <gtest/gtest.h>

#include <random>

#include "gasket/exactgeom.hpp"

using namespace gasket;

TEST(Slope, UnitSlope) {
  const auto s = make_slope(1, 1);
  EXPECT_EQ(s.tan_right(), make_rational(1, 1));
  EXPECT_EQ(s.gasket_num, 1);
  EXPECT_EQ(s.gasket_den, 3);
  EXPECT_NEAR(s.tan_gasket_value(), std::sqrt(3.0) / 3, 1e-15);
  EXPECT_FALSE(s.reduced);
  EXPECT_EQ(s.size(), 2);
}

TEST(Slope, TwoThirds) {
  const auto s = make_slope(2, 3);
  EXPECT_EQ(s.tan_right(), make_rational(2, 3));
  EXPECT_EQ(s.gasket_num, 1);
  EXPECT_EQ(s.gasket_den, 4);
  EXPECT_EQ(s.tan_gasket_coeffs(), (std::pair<std::int64_t, std::int64_t>{2, 8}));
}

TEST(Slope, ReducesWithFlag) {
  const auto s = make_slope(2, 4);
  EXPECT_EQ(s.p, 1);
  EXPECT_EQ(s.q, 2);
  EXPECT_TRUE(s.reduced);
  EXPECT_EQ(s.input_p, 2);
  EXPECT_EQ(s.input_q, 4);
}

TEST(Slope, RejectsNonpositive) {
  EXPECT_THROW(make_slope(0, 1), ValidationError);
  EXPECT_THROW(make_slope(1, 0), ValidationError);
  EXPECT_THROW(make_slope(-1, 2), ValidationError);
}

TEST(Slope, GasketTangentBelowSqrt3) {
  for (std::int64_t p = 1; p <= 30; ++p)
    for (std::int64_t q = 1; q <= 30; ++q) {
      const auto s = make_slope(p, q);
      EXPECT_LT(s.gasket_num, s.gasket_den);
      EXPECT_GT(s.tan_gasket_value(), 0.0);
      EXPECT_LT(s.tan_gasket_value(), std::sqrt(3.0));
    }
}

TEST(Slope, GasketTanRoundTrip) {
  for (std::int64_t p = 1; p <= 15; ++p)
    for (std::int64_t q = 1; q <= 15; ++q) {
      if (std::gcd(p, q) != 1) continue;
      const auto s = make_slope(p, q);
      const auto back = slope_from_gasket_tan(s.gasket_num, s.gasket_den);
      EXPECT_EQ(back, s) << p << "/" << q;
    }
  EXPECT_EQ(slope_from_gasket_tan(1, 3), make_slope(1, 1));
  EXPECT_EQ(slope_from_gasket_tan(1, 4), make_slope(2, 3));
  EXPECT_THROW(slope_from_gasket_tan(3, 2), ValidationError);
}

TEST(Slope, QPrimeConditionIsOnlyAFlag) {
  // p/q = 2/1 gives tan = sqrt(3) * 1/2: m odd, n even.
  const auto s = make_slope(2, 1);
  EXPECT_EQ(s.gasket_num, 1);
  EXPECT_EQ(s.gasket_den, 2);
  EXPECT_FALSE(s.q_prime_condition);
  EXPECT_TRUE(make_slope(1, 1).q_prime_condition);
}

TEST(Rationals, Parse) {
  EXPECT_EQ(parse_rational("1/3"), make_rational(1, 3));
  EXPECT_EQ(parse_rational("-2/4"), make_rational(-1, 2));
  EXPECT_EQ(parse_rational("5"), make_rational(5));
  EXPECT_THROW(parse_rational("1/0"), ValidationError);
  EXPECT_THROW(parse_rational("abc"), ValidationError);
}

TEST(Transform, Examples) {
  const SurdPoint e1{Surd{1, 0}, Surd{0, 0}};
  EXPECT_EQ(transform_T(e1), e1);
  const SurdPoint apex{Surd{make_rational(1, 2), 0}, Surd{0, make_rational(1, 2)}};
  const SurdPoint expect{Surd{0, 0}, Surd{1, 0}};
  EXPECT_EQ(transform_T(apex), expect);
  const SurdPoint origin{};
  EXPECT_EQ(transform_T(origin), origin);
}

TEST(Transform, InverseIsExact) {
  std::mt19937_64 eng(7);
  std::uniform_int_distribution<int> d(-20, 20), den(1, 9);
  for (int i = 0; i < 200; ++i) {
    const SurdPoint pt{Surd{make_rational(d(eng), den(eng)), make_rational(d(eng), den(eng))},
                       Surd{make_rational(d(eng), den(eng)), make_rational(d(eng), den(eng))}};
    EXPECT_EQ(inverse_transform_T(transform_T(pt)), pt);
    EXPECT_EQ(transform_T(inverse_transform_T(pt)), pt);
  }
}

TEST(LineTriangle, Examples) {
  const auto unit = make_cell({});
  EXPECT_TRUE(line_hits_triangle(RationalLine{1, 1}, unit));
  EXPECT_FALSE(line_hits_triangle(RationalLine{1, 2}, unit));
  EXPECT_TRUE(line_hits_triangle(RationalLine{1, 0}, unit));
}

TEST(LineTriangle, MonotoneUnderSubdivision) {
  std::mt19937_64 eng(11);
  std::uniform_int_distribution<int> letter(0, 2), num(-40, 40);
  for (int trial = 0; trial < 300; ++trial) {
    const RationalLine line{make_rational(1 + trial % 5, 1 + trial % 3), make_rational(num(eng), 37)};
    std::vector<std::uint8_t> w;
    for (int l = 0; l < 6; ++l) {
      const auto parent = make_cell(w);
      w.push_back(static_cast<std::uint8_t>(letter(eng)));
      if (line_hits_triangle(line, make_cell(w))) EXPECT_TRUE(line_hits_triangle(line, parent));
    }
  }
}

TEST(LineTriangle, DyadicKernelAgreesWithRationalPredicate) {
  std::mt19937_64 eng(3);
  std::uniform_int_distribution<int> letter(0, 2), num(-30, 30), den(1, 29);
  for (int trial = 0; trial < 400; ++trial) {
    const auto s = make_slope(1 + trial % 4, 1 + trial % 5);
    Rational a = make_rational(num(eng), den(eng));
    if (a > 1) a = 1;
    if (a < s.lower_end()) a = s.lower_end();
    const DyadicLineKernel kernel(s, a);
    const auto line = make_line(s, a);
    std::vector<std::uint8_t> w;
    BigInt x = 0, y = 0;
    for (unsigned l = 1; l <= 7; ++l) {
      const auto b = static_cast<std::uint8_t>(letter(eng));
      w.push_back(b);
      x = 2 * x + (b == 1 ? 1 : 0);
      y = 2 * y + (b == 2 ? 1 : 0);
      EXPECT_EQ(kernel.hits(x, y, l), line_hits_triangle(line, make_cell(w)));
    }
  }
}

TEST(Line, OffsetOutsideProjectionRejected) {
  const auto s = make_slope(2, 3);
  EXPECT_THROW(make_line(s, make_rational(11, 10)), DomainError);
  EXPECT_THROW(make_line(s, make_rational(-3, 4)), DomainError);
  EXPECT_NO_THROW(make_line(s, make_rational(-2, 3)));
  EXPECT_NO_THROW(make_line(s, make_rational(1)));
}

TEST(Cell, Vertices) {
  const auto c = make_cell({1, 2});
  EXPECT_EQ(c.vertices[0], (ExactPoint{make_rational(1, 2), make_rational(1, 4)}));
  EXPECT_EQ(c.vertices[1], (ExactPoint{make_rational(3, 4), make_rational(1, 4)}));
  EXPECT_EQ(c.vertices[2], (ExactPoint{make_rational(1, 2), make_rational(1, 2)}));
  EXPECT_THROW(make_cell({3}), ValidationError);
}
