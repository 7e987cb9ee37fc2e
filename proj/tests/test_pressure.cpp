#include <gtest/gtest.h>

#include "gasket/pressure.hpp"

using namespace gasket;

namespace {

const double kS = std::log(3.0) / std::log(2.0);

struct Fixture {
  TransitionPair tp;
  ProductEnumeration en;
  SpectrumContext ctx;
};

const Fixture& fixture(std::int64_t p, std::int64_t q) {
  static std::map<std::pair<std::int64_t, std::int64_t>, std::unique_ptr<Fixture>> cache;
  auto& slot = cache[{p, q}];
  if (!slot) {
    auto tp = build_matrices_congruence(make_slope(p, q));
    auto en = ProductEnumeration::run(tp, 20, default_threads());
    auto ctx = SpectrumContext::build(en);
    slot = std::make_unique<Fixture>(Fixture{std::move(tp), std::move(en), std::move(ctx)});
  }
  return *slot;
}

const std::vector<std::pair<std::int64_t, std::int64_t>> kSlopes{{1, 1}, {1, 2}, {2, 3}};

}  // namespace

TEST(Pressure, Anchors) {
  for (auto [p, q] : std::vector<std::pair<std::int64_t, std::int64_t>>{{1, 1}, {1, 2}, {2, 3}, {3, 5}, {4, 1}}) {
    const auto tp = build_matrices_congruence(make_slope(p, q));
    for (std::size_t n : {1, 4, 8, 12, 16}) {
      const auto en = ProductEnumeration::run(tp, n);
      EXPECT_EQ(pressure_at(en, 0.0).value, std::log(2.0));
      EXPECT_NEAR(pressure_at(en, 1.0).value, std::log(3.0) + std::log(static_cast<double>(p + q)) / n, 1e-10);
    }
  }
}

TEST(Pressure, UnitSlopeSquare) {
  const auto v = pressure_at(build_matrices_congruence(make_slope(1, 1)), 2.0, 2);
  EXPECT_NEAR(v.value, 0.5 * std::log(82.0), 1e-14);
  EXPECT_EQ(v.bound_kind, BoundKind::Upper);
  EXPECT_EQ(pressure_at(build_matrices_congruence(make_slope(1, 1)), -1.0, 2).bound_kind, BoundKind::Lower);
}

TEST(Pressure, FeketeDirection) {
  for (auto [p, q] : kSlopes) {
    const auto& f = fixture(p, q);
    for (std::size_t n : {4, 6, 8, 10}) {
      const PressureModel small(ProductEnumeration::run(f.tp, n));
      const PressureModel big(ProductEnumeration::run(f.tp, 2 * n));
      for (int i = 0; i <= 40; ++i) {
        const double t = -5 + 0.25 * i;
        if (t >= 0)
          EXPECT_LE(big.bound(t).value, small.bound(t).value + 1e-12) << t;
        else
          EXPECT_GE(big.bound(t).value, small.bound(t).value - 1e-12) << t;
      }
    }
  }
}

TEST(Pressure, ConvexAndNondecreasing) {
  for (auto [p, q] : kSlopes) {
    const PressureModel& model = fixture(p, q).ctx.pressure;
    std::vector<double> vals;
    for (int i = 0; i <= 80; ++i) vals.push_back(model.bound(-10 + 0.25 * i).value);
    for (std::size_t i = 1; i < vals.size(); ++i) EXPECT_GE(vals[i], vals[i - 1] - 1e-12);
    for (std::size_t i = 1; i + 1 < vals.size(); ++i) EXPECT_GE(vals[i + 1] - 2 * vals[i] + vals[i - 1], -1e-9);
  }
}

TEST(Pressure, IncrementEstimateAnchors) {
  for (auto [p, q] : kSlopes) {
    const PressureModel& model = fixture(p, q).ctx.pressure;
    EXPECT_NEAR(model.estimate(0.0), std::log(2.0), 1e-14);
    EXPECT_NEAR(model.estimate(1.0), std::log(3.0), 1e-12);
  }
}

TEST(Pressure, AnalyticSlopeMatchesDifferences) {
  const PressureModel& model = fixture(2, 3).ctx.pressure;
  for (double t : {0.3, 1.0, 2.5, 7.0}) {
    const double h = 1e-5;
    EXPECT_NEAR(model.estimate_slope(t), (model.estimate(t + h) - model.estimate(t - h)) / (2 * h), 1e-6);
  }
}

TEST(Derivative, DomainError) {
  const auto& model = fixture(1, 1).ctx.pressure;
  EXPECT_THROW(pressure_derivative(model, 0.0), DomainError);
  EXPECT_THROW(pressure_derivative(model, -1.0), DomainError);
}

TEST(Derivative, EndpointsMatchExponents) {
  for (auto [p, q] : kSlopes) {
    const auto& f = fixture(p, q);
    EXPECT_NEAR(pressure_derivative_zero_plus(f.ctx.pressure) / std::log(2.0), f.ctx.alpha_est, 0.02);
    EXPECT_NEAR(pressure_derivative(f.ctx.pressure, 1.0) / std::log(2.0), f.ctx.beta_est, 0.02);
    EXPECT_NEAR(pressure_derivative(f.ctx.pressure, 1.0) / std::log(2.0), *beta_exact(f.en).extrapolated, 0.02);
  }
}

TEST(Derivative, Nondecreasing) {
  for (auto [p, q] : kSlopes) {
    const auto& model = fixture(p, q).ctx.pressure;
    double prev = pressure_derivative_zero_plus(model);
    for (double t = 0.1; t < 30; t *= 1.3) {
      const double d = pressure_derivative(model, t);
      EXPECT_GE(d, prev - 1e-6) << t;
      prev = d;
    }
  }
}

TEST(Gamma, SpliceAndConservation) {
  for (auto [p, q] : kSlopes) {
    const auto& ctx = fixture(p, q).ctx;
    EXPECT_EQ(legendre_gamma(ctx, 0.0).value, 1.0);
    EXPECT_EQ(legendre_gamma(ctx, ctx.alpha_est).value, 1.0);
    EXPECT_TRUE(legendre_gamma(ctx, ctx.alpha_est).spliced);
    EXPECT_NEAR(legendre_positive_branch(ctx, ctx.alpha_est + 1e-9).value, 1.0, 1e-4);
    const auto g = legendre_gamma(ctx, ctx.beta_est);
    EXPECT_NEAR(g.value, kS - ctx.beta_est, 0.02);
    EXPECT_NEAR(g.t_star, 1.0, 0.05);
  }
}

TEST(Gamma, EndpointAndRange) {
  for (auto [p, q] : kSlopes) {
    const auto& ctx = fixture(p, q).ctx;
    const auto at = legendre_gamma(ctx, ctx.b_max);
    EXPECT_EQ(at.value, 0.0);
    EXPECT_TRUE(at.endpoint);
    EXPECT_FALSE(at.out_of_range);
    const auto beyond = legendre_gamma(ctx, ctx.b_max + 0.1);
    EXPECT_EQ(beyond.value, 0.0);
    EXPECT_TRUE(beyond.out_of_range);
    EXPECT_LE(legendre_positive_branch(ctx, ctx.b_max - 1e-9).value, 0.02);
    EXPECT_THROW(legendre_gamma(ctx, -0.1), DomainError);
  }
}

TEST(Gamma, AgreesWithDenseGridOracle) {
  const auto& ctx = fixture(1, 1).ctx;
  for (double frac : {0.1, 0.3, 0.5, 0.8}) {
    const double delta = ctx.alpha_est + frac * (ctx.b_max - ctx.alpha_est);
    auto g = [&](double t) { return -delta * t + ctx.pressure.estimate(t) / std::log(2.0); };
    double best = 1e300, arg = 0;
    for (int i = 0; i <= 20000; ++i) {
      const double t = 1e-2 * i;
      if (g(t) < best) best = g(t), arg = t;
    }
    for (int i = -1000; i <= 1000; ++i) best = std::min(best, g(std::max(0.0, arg + 1e-5 * i)));
    EXPECT_NEAR(legendre_gamma(ctx, delta).value, std::max(best, 0.0), 1e-6) << delta;
  }
}

TEST(Gamma, Nonincreasing) {
  for (auto [p, q] : kSlopes) {
    const auto& ctx = fixture(p, q).ctx;
    const auto curve = spectrum_curve(ctx, SpectrumKind::Gamma, uniform_grid(spectrum_domain(ctx, SpectrumKind::Gamma), 50));
    for (std::size_t i = 1; i < curve.points.size(); ++i)
      EXPECT_LE(curve.points[i].result.value, curve.points[i - 1].result.value + 1e-6);
    EXPECT_EQ(curve.points.front().result.value, 1.0);
    EXPECT_EQ(curve.points.back().result.value, 0.0);
  }
}

TEST(Chi, PeakAtAlpha) {
  const auto& ctx = fixture(1, 1).ctx;
  EXPECT_NEAR(spectrum_chi(ctx, ctx.alpha_est).value, 1.0, 1e-6);
  EXPECT_TRUE(spectrum_chi(ctx, ctx.alpha_est - 0.1).out_of_range);
}

TEST(Box, PeakAndEnds) {
  for (auto [p, q] : kSlopes) {
    const auto& ctx = fixture(p, q).ctx;
    EXPECT_NEAR(spectrum_box(ctx, ctx.alpha_est).value, 1.0, 1e-6);
    const auto grid = uniform_grid(spectrum_domain(ctx, SpectrumKind::Box), 201);
    double best = -1, arg = 0;
    for (double a : grid) {
      const double v = spectrum_box(ctx, a).value;
      if (v > best) {
        best = v;
        arg = a;
      }
    }
    EXPECT_LE(best, 1.0 + 1e-9);
    EXPECT_NEAR(arg, ctx.alpha_est, grid[1] - grid[0]);
    EXPECT_LE(spectrum_box(ctx, ctx.b_max).value, 0.02);
    EXPECT_TRUE(spectrum_box(ctx, ctx.b_max + 0.1).out_of_range);
  }
}

TEST(Box, DiscretelyConcave) {
  for (auto [p, q] : kSlopes) {
    const auto& ctx = fixture(p, q).ctx;
    for (auto kind : {SpectrumKind::Box, SpectrumKind::Chi, SpectrumKind::LocalDim}) {
      const auto curve = spectrum_curve(ctx, kind, uniform_grid(spectrum_domain(ctx, kind), 50));
      for (std::size_t i = 1; i + 1 < curve.points.size(); ++i) {
        const double second = curve.points[i + 1].result.value - 2 * curve.points[i].result.value +
                              curve.points[i - 1].result.value;
        EXPECT_LE(second, 1e-6) << to_string(kind) << " " << p << "/" << q << " i=" << i;
      }
    }
  }
}

TEST(LocalDim, ReflectionIdentity) {
  const auto& ctx = fixture(2, 3).ctx;
  for (double a : uniform_grid(spectrum_domain(ctx, SpectrumKind::LocalDim), 30))
    EXPECT_EQ(spectrum_localdim(ctx, a).value, spectrum_box(ctx, kS - a).value);
  EXPECT_NEAR(spectrum_localdim(ctx, kS - ctx.alpha_est).value, 1.0, 1e-6);
}

TEST(LocalDim, MeasureDimension) {
  for (auto [p, q] : kSlopes) {
    const auto& f = fixture(p, q);
    const double target = kS - f.ctx.beta_est;
    EXPECT_NEAR(spectrum_localdim(f.ctx, target).value, target, 0.02);
  }
}

TEST(Curve, KindsAndEndpoints) {
  const auto& ctx = fixture(1, 1).ctx;
  EXPECT_EQ(parse_spectrum_kind("localdim"), SpectrumKind::LocalDim);
  EXPECT_THROW(parse_spectrum_kind("nope"), ValidationError);
  const auto c = spectrum_curve(ctx, SpectrumKind::LocalDim, {1.0});
  EXPECT_NEAR(c.endpoints.first, kS - ctx.b_max, 1e-15);
  EXPECT_NEAR(c.endpoints.second, kS - ctx.b_min, 1e-15);
  EXPECT_EQ(c.n, 20u);
}

TEST(Box, NegativeValuesAreFlaggedNotClamped) {
  for (auto [p, q] : kSlopes) {
    const auto& ctx = fixture(p, q).ctx;
    for (double a : uniform_grid(spectrum_domain(ctx, SpectrumKind::Box), 25)) {
      const auto v = spectrum_box(ctx, a);
      EXPECT_EQ(v.negative, v.value < 0);
      EXPECT_FALSE(v.clamped);
    }
  }
}
