#pragma once

// CSV and JSON serialisation of results. CSV files start with `# key=value`
// metadata lines, then a header row; '.' decimal separator, LF endings.
// Doubles are written in shortest round-trip form so reruns are byte-stable.

#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gasket/exponents.hpp"
#include "gasket/matrixgen.hpp"
#include "gasket/pressure.hpp"
#include "gasket/slicer.hpp"

namespace gasket {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "1.0.0";

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// JSON cannot hold inf/nan; those become strings.
inline Json json_double(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

struct RunMetadata {
  std::string command;
  /// Absent for commands that do not take a slope.
  std::optional<std::int64_t> p;
  std::optional<std::int64_t> q;
  /// Depths, trial counts and other parameters, in insertion order.
  Json parameters = Json::object();
  std::optional<std::uint64_t> seed;
  double wall_time = 0.0;
};

inline Json metadata_json(const RunMetadata& md) {
  Json j;
  j["tool"] = "gasket-slices";
  j["version"] = kToolVersion;
  j["command"] = md.command;
  if (md.p) j["p"] = *md.p;
  if (md.q) j["q"] = *md.q;
  j["parameters"] = md.parameters;
  if (md.seed) j["seed"] = *md.seed;
  j["wall_time"] = md.wall_time;
  return j;
}

inline std::string metadata_csv(const RunMetadata& md) {
  std::ostringstream os;
  os << "# tool=gasket-slices\n# version=" << kToolVersion << "\n# command=" << md.command << "\n";
  if (md.p) os << "# p=" << *md.p << "\n";
  if (md.q) os << "# q=" << *md.q << "\n";
  for (const auto& [k, v] : md.parameters.items()) os << "# " << k << "=" << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
  if (md.seed) os << "# seed=" << *md.seed << "\n";
  os << "# wall_time=" << format_double(md.wall_time) << "\n";
  return os.str();
}

/// Removes the wall-time field so two outputs can be compared byte for byte.
inline std::string strip_wall_time(const std::string& text) {
  std::istringstream is(text);
  std::ostringstream os;
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind("# wall_time=", 0) == 0) continue;
    const auto pos = line.find("\"wall_time\":");
    if (pos != std::string::npos) {
      auto end = line.find_first_of(",}", pos);
      line.erase(pos, end == std::string::npos ? std::string::npos : end - pos);
    }
    os << line << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Matrices

inline Json matrix_json(const IntMatrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json r = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(r);
  }
  return rows;
}

inline Json matrices_json(const TransitionPair& tp) {
  Json j;
  j["p"] = tp.slope.p;
  j["q"] = tp.slope.q;
  j["A0"] = matrix_json(tp.A[0]);
  j["A1"] = matrix_json(tp.A[1]);
  return j;
}

inline std::string matrices_csv(const TransitionPair& tp) {
  std::ostringstream os;
  os << "p,q,matrix,row";
  for (std::size_t j = 1; j <= tp.size(); ++j) os << ",c" << j;
  os << "\n";
  for (unsigned b = 0; b < 2; ++b)
    for (std::size_t i = 0; i < tp.size(); ++i) {
      os << tp.slope.p << "," << tp.slope.q << ",A" << b << "," << i + 1;
      for (std::size_t j = 0; j < tp.size(); ++j) os << "," << tp.A[b](i, j);
      os << "\n";
    }
  return os.str();
}

// ---------------------------------------------------------------------------
// Exponents

struct ExponentRecord {
  std::string quantity;
  ExponentEstimate estimate;
};

inline Json exponent_json(const SlopeSpec& s, const ExponentRecord& r) {
  const auto& e = r.estimate;
  Json j;
  j["p"] = s.p;
  j["q"] = s.q;
  j["quantity"] = r.quantity;
  j["mode"] = to_string(e.mode);
  j["n"] = e.n;
  j["value"] = json_double(e.value);
  j["stderr"] = json_double(e.std_error);
  j["bound"] = e.upper_bound ? json_double(*e.upper_bound) : Json(nullptr);
  j["bound_kind"] = e.upper_bound ? "upper" : "estimate";
  if (e.extrapolated) j["extrapolated"] = json_double(*e.extrapolated);
  if (e.companion) j["companion"] = json_double(*e.companion);
  if (e.mode == EstimateMode::MonteCarlo) {
    j["trials"] = e.trials;
    j["seed"] = e.seed;
  }
  return j;
}

inline std::string exponents_csv(const SlopeSpec& s, const std::vector<ExponentRecord>& recs) {
  std::ostringstream os;
  os << "p,q,quantity,mode,n,value,stderr,bound,bound_kind,extrapolated,companion\n";
  for (const auto& r : recs) {
    const auto& e = r.estimate;
    os << s.p << "," << s.q << "," << r.quantity << "," << to_string(e.mode) << "," << e.n << ","
       << format_double(e.value) << "," << format_double(e.std_error) << ","
       << (e.upper_bound ? format_double(*e.upper_bound) : "") << "," << (e.upper_bound ? "upper" : "estimate")
       << "," << (e.extrapolated ? format_double(*e.extrapolated) : "") << ","
       << (e.companion ? format_double(*e.companion) : "") << "\n";
  }
  return os.str();
}

inline Json envelope_json(const SlopeSpec& s, const GrowthEnvelope& env) {
  Json j;
  j["p"] = s.p;
  j["q"] = s.q;
  j["n"] = env.n;
  j["b_min"] = json_double(env.b_min_est);
  j["b_max"] = json_double(env.b_max_est);
  j["b_max_bound_kind"] = "upper";
  j["min_witness"] = word_to_string(env.min_witness);
  j["max_witness"] = word_to_string(env.max_witness);
  j["b_min_extrapolated"] = json_double(env.b_min_extrapolated);
  j["b_max_extrapolated"] = json_double(env.b_max_extrapolated);
  return j;
}

inline std::string envelope_csv(const SlopeSpec& s, const GrowthEnvelope& env) {
  std::ostringstream os;
  os << "p,q,quantity,n,value,bound_kind,witness,extrapolated\n";
  os << s.p << "," << s.q << ",b_min," << env.n << "," << format_double(env.b_min_est) << ",estimate,"
     << word_to_string(env.min_witness) << "," << format_double(env.b_min_extrapolated) << "\n";
  os << s.p << "," << s.q << ",b_max," << env.n << "," << format_double(env.b_max_est) << ",upper,"
     << word_to_string(env.max_witness) << "," << format_double(env.b_max_extrapolated) << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Curves

struct CurveRow {
  double argument = 0.0;
  double value = 0.0;
  std::size_t n = 0;
  std::string bound_kind;
  std::optional<double> t_star;
  std::string flags;
};

inline std::string legendre_flags(const LegendreValue& v) {
  std::string f;
  auto add = [&](const char* s) {
    if (!f.empty()) f += "|";
    f += s;
  };
  if (v.spliced) add("spliced");
  if (v.clamped) add("clamped");
  if (v.negative) add("negative");
  if (v.endpoint) add("endpoint");
  if (v.out_of_range) add("out_of_range");
  return f;
}

inline std::vector<CurveRow> pressure_rows(const PressureModel& model, const std::vector<double>& ts) {
  std::vector<CurveRow> rows;
  for (double t : ts) {
    const auto b = model.bound(t);
    rows.push_back({t, b.value, b.n, to_string(b.bound_kind), std::nullopt, ""});
  }
  return rows;
}

inline std::vector<CurveRow> spectrum_rows(const SpectrumCurve& c) {
  std::vector<CurveRow> rows;
  for (const auto& pt : c.points)
    rows.push_back({pt.argument, pt.result.value, c.n, "estimate", pt.result.t_star, legendre_flags(pt.result)});
  return rows;
}

inline std::string curve_csv(const std::vector<CurveRow>& rows) {
  std::ostringstream os;
  os << "argument,value,n,bound_kind,t_star,flags\n";
  for (const auto& r : rows)
    os << format_double(r.argument) << "," << format_double(r.value) << "," << r.n << "," << r.bound_kind << ","
       << (r.t_star ? format_double(*r.t_star) : "") << "," << r.flags << "\n";
  return os.str();
}

inline Json curve_json(const std::vector<CurveRow>& rows) {
  Json arr = Json::array();
  for (const auto& r : rows) {
    Json j;
    j["argument"] = json_double(r.argument);
    j["value"] = json_double(r.value);
    j["n"] = r.n;
    j["bound_kind"] = r.bound_kind;
    if (r.t_star) j["t_star"] = json_double(*r.t_star);
    if (!r.flags.empty()) j["flags"] = r.flags;
    arr.push_back(j);
  }
  return arr;
}

inline Json spectrum_json(const SpectrumCurve& c) {
  Json j;
  j["kind"] = to_string(c.kind);
  j["n"] = c.n;
  j["alpha_est"] = json_double(c.alpha_est);
  j["beta_est"] = json_double(c.beta_est);
  j["endpoints"] = {json_double(c.endpoints.first), json_double(c.endpoints.second)};
  j["points"] = curve_json(spectrum_rows(c));
  return j;
}

// ---------------------------------------------------------------------------
// Slices

struct SliceReport {
  ExpandedPoint point;
  std::vector<GoodSetCount> counts;
  std::vector<GoodSetCount> alternate_counts;
  std::optional<SliceDimensionEstimate> dimension;
  std::vector<ConservationResult> conservation;
};

inline Json count_json(const GoodSetCount& c) {
  Json j;
  j["n"] = c.n;
  j["method"] = to_string(c.method);
  j["count"] = c.count ? Json(c.count->str()) : Json(nullptr);
  j["log_count"] = json_double(c.log_count);
  return j;
}

inline Json point_json(const DyadicPointRef& r) {
  Json j;
  j["k"] = r.k;
  j["prefix"] = word_to_string(r.prefix);
  j["period"] = word_to_string(r.period);
  return j;
}

inline Json slice_json(const SliceReport& rep) {
  const auto& c = rep.point.canonical;
  Json j;
  j["p"] = c.slope.p;
  j["q"] = c.slope.q;
  j["a"] = to_string(c.value);
  j["k"] = c.k;
  j["prefix"] = word_to_string(c.prefix);
  j["period"] = word_to_string(c.period);
  j["boundary"] = rep.point.boundary;
  if (rep.point.alternate) j["alternate"] = point_json(*rep.point.alternate);
  Json counts = Json::array();
  for (const auto& x : rep.counts) counts.push_back(count_json(x));
  j["counts"] = counts;
  if (!rep.alternate_counts.empty()) {
    Json alt = Json::array();
    for (const auto& x : rep.alternate_counts) alt.push_back(count_json(x));
    j["alternate_counts"] = alt;
  }
  if (rep.dimension) {
    Json d;
    d["n"] = rep.dimension->n_list;
    Json vals = Json::array();
    for (double v : rep.dimension->values) vals.push_back(json_double(v));
    d["values"] = vals;
    d["liminf_proxy"] = json_double(rep.dimension->liminf_proxy);
    d["limsup_proxy"] = json_double(rep.dimension->limsup_proxy);
    if (rep.dimension->periodic_limit) d["periodic_limit"] = json_double(*rep.dimension->periodic_limit);
    j["dimension"] = d;
  }
  if (!rep.conservation.empty()) {
    Json arr = Json::array();
    for (const auto& r : rep.conservation) {
      Json x;
      x["n"] = r.n;
      x["local_dim"] = json_double(r.local_dim);
      x["box_dim"] = json_double(r.box_dim);
      x["deviation"] = json_double(r.deviation);
      x["envelope"] = json_double(r.envelope);
      x["degenerate"] = r.degenerate;
      arr.push_back(x);
    }
    j["conservation"] = arr;
  }
  return j;
}

inline std::string slice_csv(const SliceReport& rep) {
  const auto& c = rep.point.canonical;
  std::ostringstream os;
  os << "# k=" << c.k << "\n# prefix=" << word_to_string(c.prefix)
     << "\n# period=" << word_to_string(c.period) << "\n# boundary=" << (rep.point.boundary ? "true" : "false")
     << "\n";
  if (rep.point.alternate)
    os << "# alternate_k=" << rep.point.alternate->k << "\n# alternate_prefix="
       << word_to_string(rep.point.alternate->prefix) << "\n# alternate_period="
       << word_to_string(rep.point.alternate->period) << "\n";
  os << "n,method,count,log_count,dimension,local_dim,box_dim,deviation,envelope\n";
  std::vector<std::pair<const GoodSetCount*, std::string>> rows;
  for (const auto& x : rep.counts) rows.emplace_back(&x, to_string(x.method));
  for (const auto& x : rep.alternate_counts) rows.emplace_back(&x, std::string(to_string(x.method)) + "_alternate");
  for (const auto& [xp, method] : rows) {
    const auto& x = *xp;
    os << x.n << "," << method << "," << (x.count ? x.count->str() : "") << ","
       << format_double(x.log_count) << ","
       << format_double(x.log_count / (static_cast<double>(x.n) * kLog2));
    const ConservationResult* cr = nullptr;
    for (const auto& r : rep.conservation)
      if (r.n == x.n) cr = &r;
    if (cr && method == "matrix")
      os << "," << format_double(cr->local_dim) << "," << format_double(cr->box_dim) << ","
         << format_double(cr->deviation) << "," << format_double(cr->envelope);
    else
      os << ",,,,";
    os << "\n";
  }
  return os.str();
}

}  // namespace gasket
