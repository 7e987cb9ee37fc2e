#pragma once

// Typical slice dimensions.
//
//   alpha = lim (1/(n log 2)) 2^-n  sum_w log(e A_w e)        (Lebesgue-typical)
//   beta  = lim (1/(n log 2))       sum_w eta(w) log(e A_w p) (nu-typical)
//
// Exhaustive enumeration walks the binary tree of words once, sharing
// prefixes, and keeps per-depth histograms of e A_w e together with the
// eta-weighted sums needed for beta. Everything downstream (pressure,
// envelope, spectra) reads those histograms.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "gasket/errors.hpp"
#include "gasket/matrixgen.hpp"
#include "gasket/measures.hpp"
#include "gasket/parallel.hpp"
#include "gasket/random.hpp"

namespace gasket {

inline const double kLog2 = std::log(2.0);
inline const double kLog3 = std::log(3.0);
/// Dimension of the gasket, log 3 / log 2.
inline const double kGasketDim = std::log(3.0) / std::log(2.0);

inline constexpr std::size_t kMaxExactDepth = 24;

/// Number of levels used by increment estimates, (log X_n - log X_{n-L}) / L.
/// Two levels absorb the period-two oscillation of the extremal words.
inline constexpr std::size_t kIncrementLevels = 2;

/// Word of length `depth` from its code (letters appended as code = 2*code + b).
inline Word word_from_code(std::uint64_t code, std::size_t depth) {
  Word w(depth);
  for (std::size_t i = 0; i < depth; ++i) w[depth - 1 - i] = static_cast<std::uint8_t>((code >> i) & 1U);
  return w;
}

struct DepthStats {
  /// e A_w e -> number of words w of this length
  std::map<std::uint64_t, std::uint64_t> histogram;
  std::uint64_t min_value = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t max_value = 0;
  std::uint64_t min_code = 0;
  std::uint64_t max_code = 0;
  /// sum_w eta(w)
  double eta_total = 0.0;
  /// sum_w eta(w) log(e A_w p)
  double eta_log_ep = 0.0;
  /// sum_w eta(w) log eta(w), accumulated from eta directly
  double eta_entropy = 0.0;

  std::uint64_t words() const {
    std::uint64_t n = 0;
    for (const auto& [v, c] : histogram) n += c;
    return n;
  }
  /// sum_w log(e A_w e)
  double log_sum() const {
    double s = 0.0;
    for (const auto& [v, c] : histogram) s += static_cast<double>(c) * std::log(static_cast<double>(v));
    return s;
  }
};

/// Exact statistics of all 2^d products for d = 1..depth.
class ProductEnumeration {
 public:
  static ProductEnumeration run(const TransitionPair& tp, std::size_t depth, unsigned threads = 1) {
    if (depth < 1) throw ValidationError("enumeration depth must be >= 1");
    if (depth > kMaxExactDepth)
      throw CapacityError("exact enumeration supports depth <= " + std::to_string(kMaxExactDepth));
    ProductEnumeration out(tp, depth);
    out.walk(threads);
    return out;
  }

  std::size_t depth() const { return depth_; }
  const SlopeSpec& slope() const { return slope_; }
  std::size_t size() const { return m_; }
  const PerronVector& perron() const { return perron_; }
  const DepthStats& at(std::size_t d) const {
    if (d < 1 || d > depth_) throw ValidationError("depth out of range");
    return stats_[d];
  }

 private:
  ProductEnumeration(const TransitionPair& tp, std::size_t depth)
      : slope_(tp.slope), m_(tp.size()), depth_(depth), perron_(perron_vector(tp)), stats_(depth + 1) {
    for (unsigned b = 0; b < 2; ++b) {
      support_[b].assign(m_, {});
      for (std::size_t j = 0; j < m_; ++j)
        for (std::size_t i = 0; i < m_; ++i)
          for (std::int64_t r = 0; r < tp.A[b](i, j); ++r) support_[b][j].push_back(i);
    }
  }

  struct Partial {
    std::vector<std::unordered_map<std::uint64_t, std::uint64_t>> hist;
    std::vector<std::uint64_t> min_value, max_value, min_code, max_code;
    std::vector<double> eta_total, eta_log_ep, eta_entropy;

    explicit Partial(std::size_t depth)
        : hist(depth + 1),
          min_value(depth + 1, std::numeric_limits<std::uint64_t>::max()),
          max_value(depth + 1, 0),
          min_code(depth + 1, 0),
          max_code(depth + 1, 0),
          eta_total(depth + 1, 0.0),
          eta_log_ep(depth + 1, 0.0),
          eta_entropy(depth + 1, 0.0) {}
  };

  void step(const std::vector<std::uint64_t>& row, unsigned b, std::vector<std::uint64_t>& out) const {
    out.assign(m_, 0);
    for (std::size_t j = 0; j < m_; ++j)
      for (std::size_t i : support_[b][j]) out[j] += row[i];
  }

  void record(Partial& part, std::size_t d, std::uint64_t code, const std::vector<std::uint64_t>& row) const {
    std::uint64_t sum = 0;
    double ep = 0.0;
    for (std::size_t j = 0; j < m_; ++j) {
      sum += row[j];
      ep += static_cast<double>(row[j]) * perron_.values[j];
    }
    part.hist[d][sum] += 1;
    if (sum < part.min_value[d]) {
      part.min_value[d] = sum;
      part.min_code[d] = code;
    }
    if (sum > part.max_value[d]) {
      part.max_value[d] = sum;
      part.max_code[d] = code;
    }
    const double eta = std::exp(std::log(ep) - static_cast<double>(d) * kLog3);
    part.eta_total[d] += eta;
    part.eta_log_ep[d] += eta * std::log(ep);
    part.eta_entropy[d] += eta * std::log(eta);
  }

  void descend(Partial& part, std::size_t d, std::uint64_t code, const std::vector<std::uint64_t>& row,
               std::vector<std::vector<std::uint64_t>>& scratch) const {
    if (d == depth_) return;
    for (unsigned b = 0; b < 2; ++b) {
      auto& next = scratch[d + 1];
      step(row, b, next);
      const std::uint64_t c = code * 2 + b;
      record(part, d + 1, c, next);
      descend(part, d + 1, c, next, scratch);
    }
  }

  void merge(const Partial& part) {
    for (std::size_t d = 1; d <= depth_; ++d) {
      auto& st = stats_[d];
      for (const auto& [v, c] : part.hist[d]) st.histogram[v] += c;
      if (part.min_value[d] < st.min_value) {
        st.min_value = part.min_value[d];
        st.min_code = part.min_code[d];
      }
      if (part.max_value[d] > st.max_value) {
        st.max_value = part.max_value[d];
        st.max_code = part.max_code[d];
      }
      st.eta_total += part.eta_total[d];
      st.eta_log_ep += part.eta_log_ep[d];
      st.eta_entropy += part.eta_entropy[d];
    }
  }

  void walk(unsigned threads) {
    // Words up to `split` letters are handled serially; each word of length
    // `split` roots an independent subtree. Partials are merged in code order.
    const std::size_t split = std::min<std::size_t>(depth_, 8);
    std::vector<std::vector<std::uint64_t>> frontier(std::size_t{1} << split);
    {
      Partial head(depth_);
      std::vector<std::vector<std::uint64_t>> level{std::vector<std::uint64_t>(m_, 1)};
      for (std::size_t d = 1; d <= split; ++d) {
        std::vector<std::vector<std::uint64_t>> next(level.size() * 2);
        for (std::size_t c = 0; c < level.size(); ++c)
          for (unsigned b = 0; b < 2; ++b) {
            step(level[c], b, next[2 * c + b]);
            record(head, d, 2 * c + b, next[2 * c + b]);
          }
        level.swap(next);
      }
      frontier = std::move(level);
      merge(head);
    }
    if (split == depth_) return;
    std::vector<std::optional<Partial>> parts(frontier.size());
    parallel_for_index(frontier.size(), threads, [&](std::size_t i) {
      Partial part(depth_);
      std::vector<std::vector<std::uint64_t>> scratch(depth_ + 1);
      descend(part, split, i, frontier[i], scratch);
      parts[i].emplace(std::move(part));
    });
    for (const auto& part : parts) merge(*part);
  }

  SlopeSpec slope_;
  std::size_t m_;
  std::size_t depth_;
  PerronVector perron_;
  std::array<std::vector<std::vector<std::size_t>>, 2> support_;
  std::vector<DepthStats> stats_;
};

// ---------------------------------------------------------------------------

enum class EstimateMode { ExactEnumeration, MonteCarlo };

inline const char* to_string(EstimateMode mode) {
  return mode == EstimateMode::ExactEnumeration ? "exact-enumeration" : "monte-carlo";
}

struct ExponentEstimate {
  /// Dimension units (already divided by log 2).
  double value = 0.0;
  std::size_t n = 0;
  EstimateMode mode = EstimateMode::ExactEnumeration;
  /// Standard error of the mean (Monte Carlo only).
  double std_error = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  /// Certified upper bound from subadditivity (alpha exact mode).
  std::optional<double> upper_bound;
  /// Increment estimate (n a_n - (n-L) a_{n-L}) / L; heuristic, not a bound.
  std::optional<double> extrapolated;
  /// beta only: s - b_n, the finite-level dimension of the projected measure.
  std::optional<double> companion;
};

/// a_d = (1/(d log 2)) 2^-d sum_w log(e A_w e)
inline double alpha_level(const ProductEnumeration& en, std::size_t d) {
  return en.at(d).log_sum() / (std::ldexp(1.0, static_cast<int>(d)) * static_cast<double>(d) * kLog2);
}

/// b_d = (1/(d log 2)) sum_w eta(w) log(e A_w p)
inline double beta_level(const ProductEnumeration& en, std::size_t d) {
  return en.at(d).eta_log_ep / (static_cast<double>(d) * kLog2);
}

/// -(1/(d log 2)) sum_w eta(w) log eta(w)
inline double eta_entropy_dimension(const ProductEnumeration& en, std::size_t d) {
  return -en.at(d).eta_entropy / (static_cast<double>(d) * kLog2);
}

/// (n a_n - (n-L) a_{n-L}) / L, falling back to a_n when n <= L.
template <typename Level>
double increment_estimate(std::size_t n, double a_n, Level&& level) {
  if (n <= kIncrementLevels) return a_n;
  const std::size_t k = n - kIncrementLevels;
  return (static_cast<double>(n) * a_n - static_cast<double>(k) * level(k)) / static_cast<double>(kIncrementLevels);
}

inline ExponentEstimate alpha_exact(const ProductEnumeration& en) {
  const std::size_t n = en.depth();
  ExponentEstimate est;
  est.mode = EstimateMode::ExactEnumeration;
  est.n = n;
  est.value = alpha_level(en, n);
  est.upper_bound = est.value;
  est.extrapolated = increment_estimate(n, est.value, [&](std::size_t d) { return alpha_level(en, d); });
  return est;
}

inline ExponentEstimate alpha_exact(const TransitionPair& tp, std::size_t n, unsigned threads = 1) {
  return alpha_exact(ProductEnumeration::run(tp, n, threads));
}

inline ExponentEstimate beta_exact(const ProductEnumeration& en) {
  const std::size_t n = en.depth();
  ExponentEstimate est;
  est.mode = EstimateMode::ExactEnumeration;
  est.n = n;
  est.value = beta_level(en, n);
  est.extrapolated = increment_estimate(n, est.value, [&](std::size_t d) { return beta_level(en, d); });
  est.companion = kGasketDim - est.value;
  return est;
}

inline ExponentEstimate beta_exact(const TransitionPair& tp, std::size_t n, unsigned threads = 1) {
  return beta_exact(ProductEnumeration::run(tp, n, threads));
}

// ---------------------------------------------------------------------------
// Monte Carlo

namespace detail {

struct TrialSummary {
  double mean = 0.0;
  double std_error = 0.0;
};

inline TrialSummary summarize(const std::vector<double>& xs) {
  TrialSummary s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.std_error = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  }
  return s;
}

}  // namespace detail

/// Mean over i.i.d. fair-coin words of log(e A_w e)/(n log 2). Trial i uses
/// its own engine stream, so the result is independent of the thread count.
inline ExponentEstimate alpha_monte_carlo(const TransitionPair& tp, std::size_t n, std::size_t trials,
                                          std::uint64_t seed, unsigned threads = 1) {
  if (n < 1 || trials < 1) throw ValidationError("alpha_monte_carlo needs n >= 1 and trials >= 1");
  const std::size_t m = tp.size();
  std::vector<double> samples(trials);
  parallel_for_index(trials, threads, [&](std::size_t t) {
    auto eng = make_stream_engine(seed, t);
    std::vector<double> u(m, 1.0 / static_cast<double>(m)), scratch;
    double acc = std::log(static_cast<double>(m));
    std::uint64_t bits = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k % 64 == 0) bits = eng();
      const unsigned b = static_cast<unsigned>(bits & 1U);
      bits >>= 1;
      detail::advance_row(u, scratch, tp.A[b]);
      double s = 0.0;
      for (double x : u) s += x;
      acc += std::log(s);
      for (double& x : u) x /= s;
    }
    samples[t] = acc / (static_cast<double>(n) * kLog2);
  });
  const auto sum = detail::summarize(samples);
  ExponentEstimate est;
  est.mode = EstimateMode::MonteCarlo;
  est.n = n;
  est.value = sum.mean;
  est.std_error = sum.std_error;
  est.trials = trials;
  est.seed = seed;
  return est;
}

/// Mean over eta-distributed words of log(e A_w p)/(n log 2).
inline ExponentEstimate beta_monte_carlo(const TransitionPair& tp, const PerronVector& pv, std::size_t n,
                                         std::size_t trials, std::uint64_t seed, unsigned threads = 1) {
  if (n < 1 || trials < 1) throw ValidationError("beta_monte_carlo needs n >= 1 and trials >= 1");
  const std::size_t m = tp.size();
  const EtaSampler sampler(tp, pv);
  std::vector<double> samples(trials);
  parallel_for_index(trials, threads, [&](std::size_t t) {
    auto eng = make_stream_engine(seed, t);
    double acc = std::log(static_cast<double>(m));
    double tail = 0.0;
    sampler.draw(n, eng, [&](std::uint8_t, double s, std::span<const double> u) {
      acc += std::log(s);
      tail = detail::dot(u, pv.values);
    });
    samples[t] = (acc + std::log(tail)) / (static_cast<double>(n) * kLog2);
  });
  const auto sum = detail::summarize(samples);
  ExponentEstimate est;
  est.mode = EstimateMode::MonteCarlo;
  est.n = n;
  est.value = sum.mean;
  est.std_error = sum.std_error;
  est.trials = trials;
  est.seed = seed;
  est.companion = kGasketDim - est.value;
  return est;
}

inline ExponentEstimate beta_monte_carlo(const TransitionPair& tp, std::size_t n, std::size_t trials,
                                         std::uint64_t seed, unsigned threads = 1) {
  return beta_monte_carlo(tp, perron_vector(tp), n, trials, seed, threads);
}

// ---------------------------------------------------------------------------
// Growth envelope

struct GrowthEnvelope {
  std::size_t n = 0;
  /// (1/(n log 2)) log min_w e A_w e and the same for max; b_max_est is a
  /// certified upper bound on b_max.
  double b_min_est = 0.0;
  double b_max_est = 0.0;
  Word min_witness;
  Word max_witness;
  /// Increment estimates of the limits, used as spectrum endpoints.
  double b_min_extrapolated = 0.0;
  double b_max_extrapolated = 0.0;
};

inline GrowthEnvelope growth_envelope(const ProductEnumeration& en) {
  const std::size_t n = en.depth();
  const auto& st = en.at(n);
  GrowthEnvelope env;
  env.n = n;
  const double scale = static_cast<double>(n) * kLog2;
  env.b_min_est = std::log(static_cast<double>(st.min_value)) / scale;
  env.b_max_est = std::log(static_cast<double>(st.max_value)) / scale;
  env.min_witness = word_from_code(st.min_code, n);
  env.max_witness = word_from_code(st.max_code, n);
  if (n > kIncrementLevels) {
    const auto& prev = en.at(n - kIncrementLevels);
    const double lev = static_cast<double>(kIncrementLevels) * kLog2;
    env.b_min_extrapolated =
        (std::log(static_cast<double>(st.min_value)) - std::log(static_cast<double>(prev.min_value))) / lev;
    env.b_max_extrapolated =
        (std::log(static_cast<double>(st.max_value)) - std::log(static_cast<double>(prev.max_value))) / lev;
  } else {
    env.b_min_extrapolated = env.b_min_est;
    env.b_max_extrapolated = env.b_max_est;
  }
  return env;
}

inline GrowthEnvelope growth_envelope(const TransitionPair& tp, std::size_t n, unsigned threads = 1) {
  return growth_envelope(ProductEnumeration::run(tp, n, threads));
}

}  // namespace gasket
