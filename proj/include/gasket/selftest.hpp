#pragma once

// Quick invariant suite run by `gasket selftest`.

#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "gasket/exponents.hpp"
#include "gasket/matrixgen.hpp"
#include "gasket/pressure.hpp"
#include "gasket/slicer.hpp"

namespace gasket {

struct SelftestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

inline std::vector<SlopeSpec> coprime_slopes(std::int64_t max_sum) {
  std::vector<SlopeSpec> out;
  for (std::int64_t total = 2; total <= max_sum; ++total)
    for (std::int64_t p = 1; p < total; ++p)
      if (std::gcd(p, total - p) == 1) out.push_back(make_slope(p, total - p));
  return out;
}

inline std::vector<SelftestCheck> run_selftest(unsigned threads = 1) {
  std::vector<SelftestCheck> checks;
  auto check = [&](std::string name, const std::function<std::string()>& body) {
    SelftestCheck c{std::move(name), false, ""};
    try {
      c.detail = body();
      c.passed = c.detail.empty();
    } catch (const std::exception& e) {
      c.detail = e.what();
    }
    checks.push_back(std::move(c));
  };
  const auto slopes = coprime_slopes(12);

  check("builders agree and structure holds", [&]() -> std::string {
    for (const auto& s : slopes) {
      const auto g = build_matrices_geometric(s);
      if (!(g == build_matrices_congruence(s))) return "builders differ at " + s.str();
      const auto rep = validate_structure(g);
      if (!rep.ok()) return rep.violations.front();
    }
    return {};
  });

  check("primitive word within bound", [&]() -> std::string {
    for (const auto& s : slopes) {
      const auto cert = find_primitive_word(build_matrices_congruence(s));
      if (cert.n0 > cert.length_bound) return "primitive word too long at " + s.str();
    }
    return {};
  });

  check("interval dynamics matches products", [&]() -> std::string {
    for (const auto& s : coprime_slopes(5)) {
      const auto tp = build_matrices_congruence(s);
      for (std::uint64_t code = 0; code < 16; ++code) {
        const Word w = word_from_code(code, 4);
        const auto prod = word_product(tp, w);
        for (std::size_t j = 1; j <= tp.size(); ++j) {
          const auto col = interval_dynamics_count(s, j, w);
          for (std::size_t i = 0; i < tp.size(); ++i)
            if (static_cast<std::int64_t>(col[i]) != prod(i, j - 1)) return "mismatch at " + s.str();
        }
      }
    }
    return {};
  });

  check("pressure anchors", [&]() -> std::string {
    for (const auto& s : coprime_slopes(6)) {
      const auto en = ProductEnumeration::run(build_matrices_congruence(s), 12, threads);
      const PressureModel pm(en);
      if (pm.bound(0.0).value != std::log(2.0))
        return "P(0) != ln 2 at " + s.str();
      const double expect = kLog3 + std::log(static_cast<double>(s.size())) / 12.0;
      if (std::abs(pm.bound(1.0).value - expect) > 1e-10) return "P(1) anchor fails at " + s.str();
    }
    return {};
  });

  check("conservation envelope", [&]() -> std::string {
    for (const auto& s : coprime_slopes(5)) {
      const auto tp = build_matrices_congruence(s);
      const auto pv = perron_vector(tp);
      const auto pt = expand_point(s, make_rational(1, 3));
      for (std::size_t n : {16, 32, 64}) {
        const auto r = conservation_check(tp, pv, pt.canonical, n);
        if (r.degenerate || std::abs(r.deviation) > r.envelope + 1e-12) return "envelope violated at " + s.str();
      }
    }
    return {};
  });

  return checks;
}

}  // namespace gasket
