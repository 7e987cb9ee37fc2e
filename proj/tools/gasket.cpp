// gasket: command-line front end for slices of the Sierpinski gasket.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gasket/errors.hpp"
#include "gasket/exactgeom.hpp"
#include "gasket/exponents.hpp"
#include "gasket/io.hpp"
#include "gasket/matrixgen.hpp"
#include "gasket/pressure.hpp"
#include "gasket/selftest.hpp"
#include "gasket/slicer.hpp"

namespace {

using namespace gasket;

enum ExitCode { kOk = 0, kInvalid = 1, kCapacity = 2, kInvariant = 3 };

struct Common {
  std::optional<std::int64_t> p, q;
  std::vector<std::int64_t> gasket_tan;
  std::string format = "json";
  std::string output;
  unsigned threads = default_threads();
  std::uint64_t seed = 1;
};

void add_common(CLI::App* cmd, Common& c, bool needs_slope = true) {
  if (needs_slope) {
    cmd->add_option("--p", c.p, "numerator of the right-angle slope p/q");
    cmd->add_option("--q", c.q, "denominator of the right-angle slope p/q");
    cmd->add_option("--gasket-tan", c.gasket_tan, "gasket tangent sqrt(3)*m/n, given as m n")->expected(2);
  }
  cmd->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--output", c.output, "output file (default: stdout, or $GASKET_OUTPUT_DIR/<command>.<format>)");
  cmd->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", c.seed, "random seed");
}

SlopeSpec resolve_slope(const Common& c) {
  const bool right = c.p.has_value() || c.q.has_value();
  const bool tan = !c.gasket_tan.empty();
  if (right == tan) throw ValidationError("give exactly one of --p/--q or --gasket-tan m n");
  if (right) {
    if (!c.p || !c.q) throw ValidationError("--p and --q must be given together");
    return make_slope(*c.p, *c.q);
  }
  return slope_from_gasket_tan(c.gasket_tan[0], c.gasket_tan[1]);
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    try {
      if (dash != std::string::npos) {
        const auto lo = std::stoul(item.substr(0, dash)), hi = std::stoul(item.substr(dash + 1));
        if (lo > hi) throw ValidationError("bad range '" + item + "'");
        for (auto n = lo; n <= hi; ++n) out.push_back(n);
      } else {
        out.push_back(std::stoul(item));
      }
    } catch (const std::logic_error&) {
      throw ValidationError("bad depth list '" + text + "'");
    }
  }
  if (out.empty()) throw ValidationError("empty depth list");
  return out;
}

/// Writes the payload with its metadata to --output, $GASKET_OUTPUT_DIR or stdout.
void emit(const Common& c, RunMetadata md, const std::function<std::string()>& csv,
          const std::function<Json()>& json, std::chrono::steady_clock::time_point start) {
  std::string body;
  const auto finish = [&] {
    md.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  if (c.format == "csv") {
    const std::string payload = csv();
    finish();
    body = metadata_csv(md) + payload;
  } else {
    Json doc;
    doc["result"] = json();
    finish();
    Json out;
    out["metadata"] = metadata_json(md);
    out["result"] = doc["result"];
    body = out.dump(2) + "\n";
  }
  std::string path = c.output;
  if (path.empty()) {
    if (const char* dir = std::getenv("GASKET_OUTPUT_DIR"); dir && *dir) {
      std::filesystem::create_directories(dir);
      path = (std::filesystem::path(dir) / (md.command + "." + c.format)).string();
    }
  }
  if (path.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + path);
  f << body;
}

RunMetadata base_metadata(const std::string& command, const std::optional<SlopeSpec>& s) {
  RunMetadata md;
  md.command = command;
  if (s) {
    md.p = s->p;
    md.q = s->q;
  }
  return md;
}

std::vector<double> linspace(double lo, double hi, std::size_t points) {
  if (points == 0) throw ValidationError("need at least one grid point");
  std::vector<double> g;
  for (std::size_t i = 0; i < points; ++i)
    g.push_back(points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1));
  return g;
}

int run(int argc, char** argv) {
  CLI::App app{"Slices of the Sierpinski gasket by rational lines"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  Common c;

  auto* matrices = app.add_subcommand("matrices", "transition matrices A0, A1");
  add_common(matrices, c);
  std::string builder = "congruence";
  matrices->add_option("--builder", builder, "geometric or congruence")
      ->check(CLI::IsMember({"geometric", "congruence"}));

  auto* validate = app.add_subcommand("validate", "structural checks and builder agreement");
  add_common(validate, c);

  auto* primitive = app.add_subcommand("primitive", "shortest positive word and degenerate-word counts");
  add_common(primitive, c);
  std::size_t degenerate_n = 14;
  primitive->add_option("--n", degenerate_n, "count degenerate words for lengths 1..n");

  std::string mode = "exact";
  std::size_t n = 0;
  std::size_t trials = 200;
  auto* alpha = app.add_subcommand("alpha", "Lebesgue-typical slice dimension");
  auto* beta = app.add_subcommand("beta", "measure-typical slice dimension");
  for (auto* cmd : {alpha, beta}) {
    add_common(cmd, c);
    cmd->add_option("--mode", mode, "exact or mc")->check(CLI::IsMember({"exact", "mc"}));
    cmd->add_option("--n", n, "word length (default 20 exact, 10000 mc)");
    cmd->add_option("--trials", trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
  }

  auto* envelope = app.add_subcommand("envelope", "extreme growth rates b_min, b_max");
  add_common(envelope, c);
  envelope->add_option("--n", n, "word length (default 20)");

  auto* pressure = app.add_subcommand("pressure", "finite-depth pressure P_n(t)");
  add_common(pressure, c);
  std::vector<double> ts;
  double t_lo = -5, t_hi = 5;
  std::size_t t_points = 41;
  pressure->add_option("--t", ts, "evaluation points (default: grid from --t-min to --t-max)");
  pressure->add_option("--t-min", t_lo);
  pressure->add_option("--t-max", t_hi);
  pressure->add_option("--t-points", t_points);
  pressure->add_option("--n", n, "word length (default 20)");

  auto* spectrum = app.add_subcommand("spectrum", "Gamma, chi, box or local-dimension spectrum");
  add_common(spectrum, c);
  std::string kind = "gamma";
  std::size_t points = 50;
  SpectrumOptions sopts;
  spectrum->add_option("--kind", kind)->check(CLI::IsMember({"gamma", "chi", "box", "localdim"}));
  spectrum->add_option("--points", points, "grid points over the natural domain");
  spectrum->add_option("--t-limit", sopts.t_max, "largest |t| used in the Legendre transform");
  spectrum->add_option("--n", n, "word length (default 20)");

  auto* slice = app.add_subcommand("slice", "good-set counts and slice dimension at an offset");
  add_common(slice, c);
  std::string a_text;
  std::string depths = "1-16";
  std::size_t geometric_max = 12;
  slice->add_option("--a", a_text, "offset as a rational, e.g. 1/3")->required();
  slice->add_option("--n", depths, "depths, e.g. 1-16 or 8,16,32");
  slice->add_option("--geometric-max", geometric_max, "also count cells geometrically up to this depth");

  auto* conserve = app.add_subcommand("conserve", "dimension-conservation deviation at an offset");
  add_common(conserve, c);
  std::string conserve_depths = "16,32,64";
  conserve->add_option("--a", a_text, "offset as a rational")->required();
  conserve->add_option("--n", conserve_depths, "depths");

  auto* selftest = app.add_subcommand("selftest", "run the invariant suite");
  add_common(selftest, c, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  }

  const auto start = std::chrono::steady_clock::now();
  const std::string cmd = app.get_subcommands().front()->get_name();

  if (cmd == "selftest") {
    const auto checks = run_selftest(c.threads);
    bool ok = true;
    for (const auto& ch : checks) ok = ok && ch.passed;
    auto md = base_metadata(cmd, std::nullopt);
    emit(
        c, md,
        [&] {
          std::ostringstream os;
          os << "check,passed,detail\n";
          for (const auto& ch : checks) os << ch.name << "," << (ch.passed ? "true" : "false") << "," << ch.detail << "\n";
          return os.str();
        },
        [&] {
          Json arr = Json::array();
          for (const auto& ch : checks) arr.push_back({{"check", ch.name}, {"passed", ch.passed}, {"detail", ch.detail}});
          return arr;
        },
        start);
    return ok ? kOk : kInvariant;
  }

  const SlopeSpec slope = resolve_slope(c);
  auto md = base_metadata(cmd, slope);
  const auto tp = build_matrices_congruence(slope);

  if (cmd == "matrices") {
    const auto out = builder == "geometric" ? build_matrices_geometric(slope) : tp;
    md.parameters["builder"] = builder;
    emit(c, md, [&] { return matrices_csv(out); }, [&] { return matrices_json(out); }, start);
    return kOk;
  }

  if (cmd == "validate") {
    auto rep = validate_structure(tp);
    if (!(build_matrices_geometric(slope) == tp)) rep.violations.push_back("geometric and congruence builders differ");
    emit(
        c, md,
        [&] {
          std::ostringstream os;
          os << "p,q,ok,violation\n";
          if (rep.ok()) os << slope.p << "," << slope.q << ",true,\n";
          for (const auto& v : rep.violations) os << slope.p << "," << slope.q << ",false," << v << "\n";
          return os.str();
        },
        [&] { return Json{{"p", slope.p}, {"q", slope.q}, {"ok", rep.ok()}, {"violations", rep.violations}}; },
        start);
    return rep.ok() ? kOk : kInvariant;
  }

  if (cmd == "primitive") {
    if (degenerate_n > kMaxDegenerateDepth)
      throw CapacityError("degenerate-word counts support n <= " + std::to_string(kMaxDegenerateDepth));
    const auto cert = find_primitive_word(tp);
    std::vector<std::pair<std::uint64_t, BigInt>> rows;
    for (std::size_t k = 1; k <= degenerate_n; ++k)
      rows.emplace_back(count_degenerate_words(tp, k), degenerate_word_bound(tp.size(), k));
    md.parameters["n"] = degenerate_n;
    emit(
        c, md,
        [&] {
          std::ostringstream os;
          os << "# word=" << word_to_string(cert.word) << "\n# n0=" << cert.n0 << "\n# length_bound=" << cert.length_bound
             << "\nn,degenerate_words,bound\n";
          for (std::size_t k = 0; k < rows.size(); ++k) os << k + 1 << "," << rows[k].first << "," << rows[k].second.str() << "\n";
          return os.str();
        },
        [&] {
          Json j{{"word", word_to_string(cert.word)}, {"n0", cert.n0}, {"length_bound", cert.length_bound},
                 {"product_min_entry", cert.product_min_entry}};
          Json arr = Json::array();
          for (std::size_t k = 0; k < rows.size(); ++k)
            arr.push_back({{"n", k + 1}, {"degenerate_words", rows[k].first}, {"bound", rows[k].second.str()}});
          j["degenerate"] = arr;
          return j;
        },
        start);
    return kOk;
  }

  if (cmd == "alpha" || cmd == "beta") {
    const bool mc = mode == "mc";
    if (n == 0) n = mc ? 10000 : 20;
    ExponentEstimate est;
    if (cmd == "alpha")
      est = mc ? alpha_monte_carlo(tp, n, trials, c.seed, c.threads) : alpha_exact(tp, n, c.threads);
    else
      est = mc ? beta_monte_carlo(tp, n, trials, c.seed, c.threads) : beta_exact(tp, n, c.threads);
    md.parameters["mode"] = mode;
    md.parameters["n"] = n;
    if (mc) {
      md.parameters["trials"] = trials;
      md.seed = c.seed;
    }
    const ExponentRecord rec{cmd, est};
    emit(c, md, [&] { return exponents_csv(slope, {rec}); }, [&] { return exponent_json(slope, rec); }, start);
    return kOk;
  }

  if (cmd == "envelope") {
    if (n == 0) n = 20;
    const auto env = growth_envelope(tp, n, c.threads);
    md.parameters["n"] = n;
    emit(c, md, [&] { return envelope_csv(slope, env); }, [&] { return envelope_json(slope, env); }, start);
    return kOk;
  }

  if (cmd == "pressure") {
    if (n == 0) n = 20;
    if (ts.empty()) ts = linspace(t_lo, t_hi, t_points);
    const PressureModel model(ProductEnumeration::run(tp, n, c.threads));
    const auto rows = pressure_rows(model, ts);
    md.parameters["n"] = n;
    emit(c, md, [&] { return curve_csv(rows); }, [&] { return curve_json(rows); }, start);
    return kOk;
  }

  if (cmd == "spectrum") {
    if (n == 0) n = 20;
    const auto ctx = SpectrumContext::build(ProductEnumeration::run(tp, n, c.threads), sopts);
    const auto k = parse_spectrum_kind(kind);
    const auto curve = spectrum_curve(ctx, k, uniform_grid(spectrum_domain(ctx, k), points));
    md.parameters["kind"] = kind;
    md.parameters["n"] = n;
    md.parameters["points"] = points;
    md.parameters["t_limit"] = sopts.t_max;
    md.parameters["alpha_est"] = ctx.alpha_est;
    md.parameters["beta_est"] = ctx.beta_est;
    md.parameters["b_min"] = ctx.b_min;
    md.parameters["b_max"] = ctx.b_max;
    emit(c, md, [&] { return curve_csv(spectrum_rows(curve)); }, [&] { return spectrum_json(curve); }, start);
    return kOk;
  }

  if (cmd == "slice" || cmd == "conserve") {
    const Rational a = parse_rational(a_text);
    SliceReport rep;
    rep.point = expand_point(slope, a);
    const auto ns = parse_size_list(cmd == "slice" ? depths : conserve_depths);
    md.parameters["a"] = to_string(a);
    md.parameters["n"] = cmd == "slice" ? depths : conserve_depths;
    if (cmd == "slice") {
      for (std::size_t d : ns) {
        rep.counts.push_back(good_set_count_matrix(tp, rep.point.canonical, d));
        if (rep.point.alternate) rep.alternate_counts.push_back(good_set_count_matrix(tp, *rep.point.alternate, d));
      }
      for (std::size_t d : ns)
        if (d <= geometric_max && d <= kMaxGeometricDepth)
          rep.counts.push_back(good_set_count_geometric(slope, a, d, c.threads));
      rep.dimension = slice_dimension_estimate(tp, rep.point.canonical, ns);
      const auto pv = perron_vector(tp);
      for (std::size_t d : ns) rep.conservation.push_back(conservation_check(tp, pv, rep.point.canonical, d));
      md.parameters["geometric_max"] = geometric_max;
    } else {
      const auto pv = perron_vector(tp);
      for (std::size_t d : ns) {
        rep.counts.push_back(good_set_count_matrix(tp, rep.point.canonical, d));
        rep.conservation.push_back(conservation_check(tp, pv, rep.point.canonical, d));
      }
    }
    emit(c, md, [&] { return slice_csv(rep); }, [&] { return slice_json(rep); }, start);
    if (cmd == "conserve")
      for (const auto& r : rep.conservation)
        if (r.degenerate || std::abs(r.deviation) > r.envelope + 1e-12) return kInvariant;
    return kOk;
  }
  return kInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const gasket::CapacityError& e) {
    std::cerr << "capacity exceeded: " << e.what() << "\n";
    return kCapacity;
  } catch (const gasket::InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return kInvariant;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvariant;
  }
}
