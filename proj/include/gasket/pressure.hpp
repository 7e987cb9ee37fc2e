#pragma once

// Pressure P(t) = lim (1/n) log sum_w (e A_w e)^t and its Legendre transforms.
//
// Two finite-depth versions are exposed:
//  * P_n(t) = (1/n) log Z_n(t), Z_n(t) = sum_w (e A_w e)^t. Since e A e is
//    submultiplicative, n P_n(t) is subadditive for t >= 0 (P_n is an upper
//    bound on P) and superadditive for t < 0 (a lower bound).
//  * the increment estimate (log Z_n(t) - log Z_{n-L}(t)) / L. It drops the
//    O(1/n) boundary term of P_n, equals log 3 at t = 1 and log 2 at t = 0 for
//    every n, and is what the derivative and the spectra are computed from.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "gasket/errors.hpp"
#include "gasket/exponents.hpp"

namespace gasket {

enum class BoundKind { Upper, Lower, Estimate };

inline const char* to_string(BoundKind k) {
  switch (k) {
    case BoundKind::Upper: return "upper";
    case BoundKind::Lower: return "lower";
    case BoundKind::Estimate: return "estimate";
  }
  return "?";
}

struct PressureValue {
  double value = 0.0;
  BoundKind bound_kind = BoundKind::Upper;
  std::size_t n = 0;
};

/// log Z_d(t) for the stored depths, evaluated in log space.
class PressureModel {
 public:
  explicit PressureModel(const ProductEnumeration& en) : n_(en.depth()), m_(en.size()) {
    levels_.resize(n_ + 1);
    for (std::size_t d = 1; d <= n_; ++d) {
      auto& lv = levels_[d];
      for (const auto& [v, c] : en.at(d).histogram) {
        lv.log_value.push_back(std::log(static_cast<double>(v)));
        lv.log_count.push_back(std::log(static_cast<double>(c)));
      }
    }
  }

  std::size_t depth() const { return n_; }
  std::size_t size() const { return m_; }

  /// log Z_d(t)
  double log_partition(std::size_t d, double t) const {
    const auto& lv = level(d);
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lv.log_value.size(); ++i) top = std::max(top, t * lv.log_value[i] + lv.log_count[i]);
    double s = 0.0;
    for (std::size_t i = 0; i < lv.log_value.size(); ++i) s += std::exp(t * lv.log_value[i] + lv.log_count[i] - top);
    return top + std::log(s);
  }

  /// d/dt log Z_d(t): the (e A e)^t-weighted mean of log(e A_w e).
  double log_partition_slope(std::size_t d, double t) const {
    const auto& lv = level(d);
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lv.log_value.size(); ++i) top = std::max(top, t * lv.log_value[i] + lv.log_count[i]);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < lv.log_value.size(); ++i) {
      const double w = std::exp(t * lv.log_value[i] + lv.log_count[i] - top);
      num += w * lv.log_value[i];
      den += w;
    }
    return num / den;
  }

  /// P_n(t) with its certificate direction.
  PressureValue bound(double t) const {
    // Z_n(0) = 2^n exactly.
    if (t == 0.0) return {kLog2, BoundKind::Upper, n_};
    return {log_partition(n_, t) / static_cast<double>(n_), t >= 0 ? BoundKind::Upper : BoundKind::Lower, n_};
  }

  std::size_t increment_levels() const { return n_ > kIncrementLevels ? kIncrementLevels : 0; }

  /// Increment estimate of P(t); falls back to P_n when the depth is too small.
  double estimate(double t) const {
    const std::size_t L = increment_levels();
    if (L == 0 || t == 0.0) return bound(t).value;
    return (log_partition(n_, t) - log_partition(n_ - L, t)) / static_cast<double>(L);
  }

  /// Closed-form derivative of `estimate`.
  double estimate_slope(double t) const {
    const std::size_t L = increment_levels();
    if (L == 0) return log_partition_slope(n_, t) / static_cast<double>(n_);
    return (log_partition_slope(n_, t) - log_partition_slope(n_ - L, t)) / static_cast<double>(L);
  }

 private:
  struct Level {
    std::vector<double> log_value;
    std::vector<double> log_count;
  };
  const Level& level(std::size_t d) const {
    if (d < 1 || d > n_) throw ValidationError("pressure depth out of range");
    return levels_[d];
  }

  std::size_t n_;
  std::size_t m_;
  std::vector<Level> levels_;
};

inline PressureValue pressure_at(const ProductEnumeration& en, double t) { return PressureModel(en).bound(t); }

inline PressureValue pressure_at(const TransitionPair& tp, double t, std::size_t n, unsigned threads = 1) {
  return pressure_at(ProductEnumeration::run(tp, n, threads), t);
}

inline constexpr double kDerivativeStep = 1e-3;

/// dP/dt (natural-log units) for t > 0: central differences of the increment
/// estimate with one Richardson level.
inline double pressure_derivative(const PressureModel& model, double t) {
  if (!(t > 0)) throw DomainError("pressure derivative is only defined for t > 0");
  const double h = kDerivativeStep;
  auto central = [&](double step) { return (model.estimate(t + step) - model.estimate(t - step)) / (2 * step); };
  return (4 * central(h / 2) - central(h)) / 3;
}

/// lim_{t -> 0+} P'(t): one-sided differences at 0 with one Richardson level.
inline double pressure_derivative_zero_plus(const PressureModel& model) {
  const double h = kDerivativeStep;
  const double p0 = model.estimate(0.0);
  auto forward = [&](double step) { return (model.estimate(step) - p0) / step; };
  return 2 * forward(h / 2) - forward(h);
}

// ---------------------------------------------------------------------------
// Legendre transforms and spectra

struct SpectrumOptions {
  /// Near b_max the minimiser runs off to t of several hundred when the
  /// maximal product is shared by few words, so the bracket is wide.
  double t_max = 2000.0;
  /// Points of the coarse t scan (geometrically spaced away from 0) that
  /// brackets the minimiser before golden-section refinement.
  std::size_t scan_points = 400;
  double golden_tolerance = 1e-10;
};

namespace detail {

/// Coarse t scan on [lo, hi], geometrically spaced from the end nearest 0,
/// where the curvature is.
inline std::vector<double> scan_grid(double lo, double hi, std::size_t pts) {
  pts = std::max<std::size_t>(pts, 3);
  const double span = hi - lo;
  const double first = std::min(1e-4, span);
  const double ratio = std::pow(span / first, 1.0 / static_cast<double>(pts - 2));
  std::vector<double> offs(pts);
  offs[0] = 0.0;
  for (std::size_t i = 1; i < pts; ++i) offs[i] = first * std::pow(ratio, static_cast<double>(i - 1));
  offs.back() = span;
  std::vector<double> ts(pts);
  const bool from_lo = std::abs(lo) <= std::abs(hi);
  for (std::size_t i = 0; i < pts; ++i) ts[i] = from_lo ? lo + offs[i] : hi - offs[pts - 1 - i];
  return ts;
}

/// Pressure estimates on a scan grid; the grid does not depend on the
/// Legendre argument, so one table serves every evaluation.
struct ScanTable {
  double lo = 0.0, hi = 0.0;
  std::vector<double> ts, ps;

  ScanTable() = default;
  ScanTable(const PressureModel& model, double lo_, double hi_, std::size_t pts)
      : lo(lo_), hi(hi_), ts(scan_grid(lo_, hi_, pts)) {
    ps.reserve(ts.size());
    for (double t : ts) ps.push_back(model.estimate(t));
  }
};

}  // namespace detail

/// Everything a spectrum evaluation needs, derived from one enumeration.
struct SpectrumContext {
  PressureModel pressure;
  std::size_t n = 0;
  /// alpha and beta estimates (dimension units), increment-extrapolated.
  double alpha_est = 0.0;
  double beta_est = 0.0;
  /// Spectrum domain endpoints.
  double b_min = 0.0;
  double b_max = 0.0;
  SpectrumOptions options;
  /// Scan tables for [0, t_max] and [-t_max, 0].
  std::array<detail::ScanTable, 2> scans;

  static SpectrumContext build(const ProductEnumeration& en, SpectrumOptions opts = {}) {
    const auto env = growth_envelope(en);
    SpectrumContext ctx{PressureModel(en), en.depth(), 0.0, 0.0, env.b_min_extrapolated, env.b_max_extrapolated,
                        opts, {}};
    ctx.alpha_est = *alpha_exact(en).extrapolated;
    ctx.beta_est = *beta_exact(en).extrapolated;
    ctx.scans[0] = detail::ScanTable(ctx.pressure, 0.0, opts.t_max, opts.scan_points);
    ctx.scans[1] = detail::ScanTable(ctx.pressure, -opts.t_max, 0.0, opts.scan_points);
    return ctx;
  }
};

struct LegendreValue {
  double value = 0.0;
  /// Minimising t (0 when the value is the splice constant).
  double t_star = 0.0;
  bool out_of_range = false;
  /// Value fixed to 1 on [0, alpha].
  bool spliced = false;
  /// The finite-t infimum fell below 0 and was clamped (Gamma, chi).
  bool clamped = false;
  /// Box/local-dimension value below 0, reported unclamped.
  bool negative = false;
  /// Endpoint delta >= b_max reported as 0.
  bool endpoint = false;
};

namespace detail {

/// min over t in [lo, hi] of g(t) = -x t + P(t)/log 2: coarse scan, then
/// golden section inside the bracket around the best scan point.
inline std::pair<double, double> minimise_legendre(const SpectrumContext& ctx, double x, double lo, double hi) {
  auto g = [&](double t) { return -x * t + ctx.pressure.estimate(t) / kLog2; };
  const ScanTable* table = nullptr;
  for (const auto& s : ctx.scans)
    if (s.lo == lo && s.hi == hi && !s.ts.empty()) table = &s;
  const ScanTable local = table ? ScanTable() : ScanTable(ctx.pressure, lo, hi, ctx.options.scan_points);
  if (!table) table = &local;
  const auto& ts = table->ts;
  const std::size_t pts = ts.size();
  auto scan_value = [&](std::size_t i) { return -x * ts[i] + table->ps[i] / kLog2; };
  std::size_t best = 0;
  double best_val = scan_value(0);
  for (std::size_t i = 1; i < pts; ++i) {
    const double v = scan_value(i);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  double a = ts[best == 0 ? 0 : best - 1];
  double b = ts[best + 1 == pts ? pts - 1 : best + 1];
  const double phi = (std::sqrt(5.0) - 1) / 2;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double gc = g(c), gd = g(d);
  while (b - a > ctx.options.golden_tolerance) {
    if (gc < gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - phi * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + phi * (b - a);
      gd = g(d);
    }
  }
  const double tm = (a + b) / 2;
  const double gm = g(tm);
  if (gm < best_val) return {gm, tm};
  return {best_val, ts[best]};
}

}  // namespace detail

/// inf_{t > 0} { -delta t + P(t)/log 2 } without the splice.
inline LegendreValue legendre_positive_branch(const SpectrumContext& ctx, double delta) {
  LegendreValue out;
  auto [v, t] = detail::minimise_legendre(ctx, delta, 0.0, ctx.options.t_max);
  out.value = v;
  out.t_star = t;
  if (out.value < 0) {
    out.value = 0;
    out.clamped = true;
  }
  return out;
}

/// Gamma(delta): 1 on [0, alpha], the positive-branch Legendre transform on
/// (alpha, b_max], 0 beyond.
inline LegendreValue legendre_gamma(const SpectrumContext& ctx, double delta) {
  if (delta < 0) throw DomainError("Gamma is defined for delta >= 0");
  if (delta <= ctx.alpha_est) {
    LegendreValue out;
    out.value = 1.0;
    out.spliced = true;
    return out;
  }
  if (delta >= ctx.b_max) {
    LegendreValue out;
    out.value = 0.0;
    out.endpoint = true;
    out.out_of_range = delta > ctx.b_max;
    return out;
  }
  return legendre_positive_branch(ctx, delta);
}

/// chi(delta) for alpha <= delta <= b_max; same transform as Gamma there.
inline LegendreValue spectrum_chi(const SpectrumContext& ctx, double delta) {
  if (delta < ctx.alpha_est || delta > ctx.b_max) {
    LegendreValue out;
    out.out_of_range = true;
    return out;
  }
  if (delta == ctx.b_max) {
    LegendreValue out;
    out.endpoint = true;
    return out;
  }
  return legendre_positive_branch(ctx, delta);
}

/// inf over all t of { -a t + P(t)/log 2 }, both branches, t in [-t_max, t_max].
/// Not clamped: a negative value marks where the finite-depth estimate has not
/// converged, and clamping would break concavity.
inline LegendreValue spectrum_box(const SpectrumContext& ctx, double a) {
  LegendreValue out;
  out.out_of_range = a < ctx.b_min || a > ctx.b_max;
  auto [vp, tp] = detail::minimise_legendre(ctx, a, 0.0, ctx.options.t_max);
  auto [vn, tn] = detail::minimise_legendre(ctx, a, -ctx.options.t_max, 0.0);
  out.value = vp <= vn ? vp : vn;
  out.t_star = vp <= vn ? tp : tn;
  out.negative = out.value < 0;
  return out;
}

/// Local-dimension spectrum of the projected measure: the box spectrum at s - a.
inline LegendreValue spectrum_localdim(const SpectrumContext& ctx, double a) {
  return spectrum_box(ctx, kGasketDim - a);
}

// ---------------------------------------------------------------------------

enum class SpectrumKind { Gamma, Chi, Box, LocalDim };

inline const char* to_string(SpectrumKind k) {
  switch (k) {
    case SpectrumKind::Gamma: return "gamma";
    case SpectrumKind::Chi: return "chi";
    case SpectrumKind::Box: return "box";
    case SpectrumKind::LocalDim: return "localdim";
  }
  return "?";
}

inline SpectrumKind parse_spectrum_kind(const std::string& s) {
  if (s == "gamma") return SpectrumKind::Gamma;
  if (s == "chi") return SpectrumKind::Chi;
  if (s == "box") return SpectrumKind::Box;
  if (s == "localdim") return SpectrumKind::LocalDim;
  throw ValidationError("unknown spectrum kind '" + s + "'");
}

struct SpectrumPoint {
  double argument = 0.0;
  LegendreValue result;
};

struct SpectrumCurve {
  SpectrumKind kind = SpectrumKind::Gamma;
  std::vector<SpectrumPoint> points;
  /// Domain endpoints: (b_min, b_max), or (s - b_max, s - b_min) for localdim.
  std::pair<double, double> endpoints;
  double alpha_est = 0.0;
  double beta_est = 0.0;
  std::size_t n = 0;
};

/// Natural domain of a spectrum kind.
inline std::pair<double, double> spectrum_domain(const SpectrumContext& ctx, SpectrumKind kind) {
  switch (kind) {
    case SpectrumKind::Gamma: return {0.0, ctx.b_max};
    case SpectrumKind::Chi: return {ctx.alpha_est, ctx.b_max};
    case SpectrumKind::Box: return {ctx.b_min, ctx.b_max};
    case SpectrumKind::LocalDim: return {kGasketDim - ctx.b_max, kGasketDim - ctx.b_min};
  }
  return {0.0, 0.0};
}

/// `points` evenly spaced arguments covering the kind's domain, endpoints included.
inline std::vector<double> uniform_grid(std::pair<double, double> domain, std::size_t points) {
  std::vector<double> g;
  if (points == 0) return g;
  if (points == 1) return {domain.first};
  for (std::size_t i = 0; i < points; ++i)
    g.push_back(domain.first + (domain.second - domain.first) * static_cast<double>(i) / static_cast<double>(points - 1));
  g.back() = domain.second;
  return g;
}

inline SpectrumCurve spectrum_curve(const SpectrumContext& ctx, SpectrumKind kind, const std::vector<double>& grid) {
  SpectrumCurve curve;
  curve.kind = kind;
  curve.alpha_est = ctx.alpha_est;
  curve.beta_est = ctx.beta_est;
  curve.n = ctx.n;
  curve.endpoints = kind == SpectrumKind::LocalDim ? std::pair{kGasketDim - ctx.b_max, kGasketDim - ctx.b_min}
                                                   : std::pair{ctx.b_min, ctx.b_max};
  for (double x : grid) {
    LegendreValue v;
    switch (kind) {
      case SpectrumKind::Gamma: v = legendre_gamma(ctx, x); break;
      case SpectrumKind::Chi: v = spectrum_chi(ctx, x); break;
      case SpectrumKind::Box: v = spectrum_box(ctx, x); break;
      case SpectrumKind::LocalDim: v = spectrum_localdim(ctx, x); break;
    }
    curve.points.push_back({x, v});
  }
  return curve;
}

}  // namespace gasket
