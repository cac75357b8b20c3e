/**
 * @brief modsym-lab command-line driver.
 */

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "modsym/cuspform.hpp"
#include "modsym/eisenstein.hpp"
#include "modsym/enumerate.hpp"
#include "modsym/errors.hpp"
#include "modsym/io.hpp"
#include "modsym/modsym.hpp"
#include "modsym/pipeline.hpp"
#include "modsym/stats.hpp"
#include "modsym/summatory.hpp"
#include "modsym/verify/acceptance.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace modsym;

namespace {

enum Exit { kOk = 0, kAcceptance = 1, kConfig = 2, kCompute = 3 };

std::vector<double> parse_reals(const std::string& s, std::size_t expect, const char* what) {
  std::vector<double> out;
  try {
    for (const auto& p : detail::split(s, ',')) out.push_back(detail::parse_real(detail::trim(p)));
  } catch (const FormatError&) {
    throw ConfigError(std::string(what) + ": cannot parse '" + s + "'");
  }
  if (expect != 0 && out.size() != expect)
    throw ConfigError(std::string(what) + ": expected " + std::to_string(expect) + " comma-separated values");
  return out;
}

std::vector<i64> parse_ints(const std::string& s, std::size_t expect, const char* what) {
  std::vector<i64> out;
  try {
    for (const auto& p : detail::split(s, ',')) out.push_back(detail::parse_int(detail::trim(p)));
  } catch (const FormatError&) {
    throw ConfigError(std::string(what) + ": cannot parse '" + s + "'");
  }
  if (out.size() != expect)
    throw ConfigError(std::string(what) + ": expected " + std::to_string(expect) + " comma-separated integers");
  return out;
}

/// Flags shared by every subcommand; each overrides the matching config field.
struct Common {
  std::string config, gamma1, zref, tgrid, out, coeff_file, cache_dir;
  i64 level = 0;
  double T = 0, U = 0;
  int digits = 0;
  unsigned threads = 0;
  bool allow_bound_violation = false;
  std::vector<CLI::Option*> opts;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "JSON config file");
    opts = {app->add_option("--N", level, "level N"),
            app->add_option("--T", T, "norm bound T"),
            app->add_option("--Tgrid", tgrid, "comma-separated T grid"),
            app->add_option("--digits", digits, "symbol precision D"),
            app->add_option("--U", U, "smoothing parameter U"),
            app->add_option("--out", out, "output directory"),
            app->add_option("--coeff-file", coeff_file, "q-expansion coefficient file"),
            app->add_option("--threads", threads, "worker threads"),
            app->add_option("--gamma1", gamma1, "explicit gamma1 as a,b,c,d or 'auto'"),
            app->add_option("--zref", zref, "reference point x,y"),
            app->add_option("--cache-dir", cache_dir, "cache directory"),
            app->add_flag("--allow-bound-violation", allow_bound_violation,
                          "accept coefficients beyond |a_n| <= d(n) sqrt(n)")};
  }

  bool given(std::size_t k) const { return opts[k]->count() > 0; }

  RunConfig resolve() const {
    RunConfig c = config.empty() ? RunConfig{} : load_config(config);
    if (given(0)) c.level = level;
    if (given(1)) c.T = T;
    if (given(2)) c.T_grid = parse_reals(tgrid, 0, "--Tgrid");
    if (given(3)) c.digits = digits;
    if (given(4)) c.U = U;
    if (given(5)) c.output_dir = out;
    if (given(6)) c.coeff_file = coeff_file;
    if (given(7)) c.threads = threads;
    if (given(8)) {
      if (gamma1 == "auto") c.gamma1.reset();
      else {
        const auto v = parse_ints(gamma1, 4, "--gamma1");
        try {
          c.gamma1 = GroupElement(v[0], v[1], v[2], v[3]);
        } catch (const DomainError& e) {
          throw ConfigError(std::string("--gamma1: ") + e.what());
        }
      }
    }
    if (given(9)) {
      const auto v = parse_reals(zref, 2, "--zref");
      if (!(v[1] > 0.0)) throw ConfigError("--zref must lie in the upper half-plane");
      c.z_ref = HPoint(v[0], v[1]);
    }
    if (given(10)) c.cache_dir = cache_dir;
    if (given(11)) c.allow_bound_violation = true;
    if (c.cache_dir.empty()) c.cache_dir = (fs::path(c.output_dir) / "cache").string();
    validate(c);
    return c;
  }
};

void require_grid(const RunConfig& c) {
  if (c.T_grid.size() < 4) throw ConfigError("T_grid needs at least 4 strictly increasing points");
}

fs::path write_report(const RunConfig& c, const std::string& name, const json& result) {
  fs::create_directories(c.output_dir);
  json j;
  j["command"] = name;
  j["config"] = to_json(c);
  j["result"] = result;
  const fs::path path = fs::path(c.output_dir) / (name + "_report.json");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path.string());
  os << j.dump(2) << '\n';
  return path;
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

json context_json(const HyperbolicContext& ctx) {
  const auto& g = ctx.gamma1;
  return {{"gamma1", {g.a, g.b, g.c, g.d}}, {"mu", ctx.mu}, {"log_mu", ctx.log_mu}};
}

// ---------------------------------------------------------------------------

int cmd_enumerate(const RunConfig& c) {
  Workspace ws(c);
  const auto e = ws.enumeration(c.T);
  const double density = static_cast<double>(e.reps.size()) / c.T;
  const double predicted = counting_constant(e.context, e.z_ref.y, ws.volume());
  json r{{"context", context_json(e.context)},
         {"T", c.T},
         {"count", e.reps.size()},
         {"density", density},
         {"predicted_density", predicted}};
  const auto path = write_report(c, "enumerate", r);
  std::cout << "N=" << c.level << " T=" << detail::format_double(c.T) << " count=" << e.reps.size()
            << " density=" << detail::format_double(density) << " predicted=" << detail::format_double(predicted)
            << " cache=" << (ws.last_enumeration_cached() ? "hit" : "miss") << '\n'
            << "report: " << path.string() << '\n';
  return kOk;
}

int cmd_symbols(const RunConfig& c) {
  Workspace ws(c);
  const auto e = ws.enumeration(c.T);
  const auto& t = ws.symbols(e);
  std::vector<SymbolValue> v;
  double max_err = 0.0;
  for (const auto& rep : e.reps) {
    v.push_back(t.at(rep.rep));
    max_err = std::max(max_err, v.back().abs_err);
  }
  json r{{"context", context_json(e.context)}, {"T", c.T}, {"count", v.size()}, {"max_abs_err", max_err}};
  if (!v.empty()) {
    const auto L = period_lattice(v);
    const auto pn = petersson_norm(L);
    r["lattice"] = {{"w1", complex_json(L.w1)}, {"w2", complex_json(L.w2)}, {"covolume", L.covolume},
                    {"outliers", L.outliers}};
    r["petersson_norm_sq"] = pn.value;
  }
  fs::create_directories(c.output_dir);
  SymbolTable out(t.digits());
  for (const auto& s : v) out.insert(s);
  const fs::path csv = fs::path(c.output_dir) / "symbols.csv";
  save_symbols(out, csv);
  const auto path = write_report(c, "symbols", r);
  std::cout << "symbols=" << v.size() << " max_abs_err=" << detail::format_double(max_err) << '\n'
            << "csv: " << csv.string() << '\n'
            << "report: " << path.string() << '\n';
  return kOk;
}

int cmd_eisenstein(const RunConfig& c, const std::string& zs, const std::string& ss, const std::string& os) {
  const auto zv = parse_reals(zs, 2, "--z");
  const auto sv = parse_reals(ss, 2, "--s");
  const auto ov = parse_ints(os, 2, "--order");
  if (!(zv[1] > 0.0)) throw ConfigError("--z must lie in the upper half-plane");
  if (ov[0] < 0 || ov[1] < 0 || ov[0] + ov[1] > kMaxTwist) throw ConfigError("--order out of range");
  Workspace ws(c);
  const auto e = ws.enumeration(c.T);
  const HPoint z(zv[0], zv[1]);
  const cplx s(sv[0], sv[1]);
  const TwistOrder order{static_cast<int>(ov[0]), static_cast<int>(ov[1])};
  const EisensteinValue v =
      order.m + order.n == 0 ? eval_plain(z, s, e) : eval_twisted(z, s, order, e, ws.symbols(e));
  json r{{"z", {z.x, z.y}},         {"s", complex_json(s)},
         {"order", {order.m, order.n}}, {"value", complex_json(v.value)},
         {"truncation_T", v.truncation_T}, {"tail_estimate", v.tail_estimate},
         {"terms", v.terms}};
  const auto path = write_report(c, "eisenstein", r);
  std::cout << "E(z,s) = " << detail::format_double(v.value.real()) << " + " << detail::format_double(v.value.imag())
            << "i  (terms " << v.terms << ", heuristic tail " << detail::format_double(v.tail_estimate) << ")\n"
            << "report: " << path.string() << '\n';
  return kOk;
}

int cmd_counting(const RunConfig& c) {
  require_grid(c);
  Workspace ws(c);
  const auto e = ws.enumeration(c.T_grid.back());
  const auto f = fit_counting(e, c.T_grid, ws.volume());
  json r = to_json(f);
  r["counts"] = f.values;
  std::vector<double> decay;
  for (std::size_t i = 0; i < f.T_grid.size(); ++i)
    decay.push_back(std::abs(f.residuals[i]) / std::pow(f.T_grid[i], 7.0 / 8.0));
  r["residual_over_T_7_8"] = decay;
  const auto path = write_report(c, "counting", r);
  std::cout << "beta=" << detail::format_double(f.leading_coeff) << " predicted=" << detail::format_double(f.paper_coeff)
            << " rel_dev=" << detail::format_double(f.rel_dev) << '\n'
            << "report: " << path.string() << '\n';
  return kOk;
}

int cmd_moments(const RunConfig& c, int m, int n) {
  require_grid(c);
  if (m < 0 || n < 0 || m + n > 4) throw ConfigError("--m, --n must be >= 0 with m + n <= 4");
  Workspace ws(c);
  const auto e = ws.enumeration(c.T_grid.back());
  const auto& t = ws.symbols(e);
  const auto pn = ws.petersson(e);
  auto f = moment_sum(m, n, e, t, c.T_grid, pn.value, ws.volume());
  f.U = c.U;
  const auto path = write_report(c, "moments", to_json(f));
  std::cout << "(m,n)=(" << m << ',' << n << ") fitted=" << detail::format_double(f.leading_coeff)
            << " predicted=" << detail::format_double(f.paper_coeff) << " rel_dev=" << detail::format_double(f.rel_dev)
            << '\n'
            << "report: " << path.string() << '\n';
  return kOk;
}

int cmd_distribution(const RunConfig& c, bool svg) {
  if (c.T_grid.empty()) throw ConfigError("T_grid must not be empty");
  Workspace ws(c);
  const auto e = ws.enumeration(c.T_grid.back());
  const auto& t = ws.symbols(e);
  const auto pn = ws.petersson(e);
  const auto normalized = normalize_all(e, t, ws.volume(), pn);
  json r{{"petersson_norm_sq", pn.value}, {"per_T", json::array()}};
  fs::create_directories(c.output_dir);
  EmpiricalDistribution last;
  for (double T : c.T_grid) {
    last = build_distribution(e, normalized, T);
    r["per_T"].push_back(distribution_report(last));
  }
  const fs::path csv = fs::path(c.output_dir) / "distribution.csv";
  write_distribution_csv(last, csv);
  std::cout << "T=" << detail::format_double(last.T) << " samples=" << last.count()
            << " M20=" << detail::format_double(moments(last, 2, 0)) << " M02=" << detail::format_double(moments(last, 0, 2))
            << " KSx=" << detail::format_double(ks_statistic(last, Coord::x))
            << " KSy=" << detail::format_double(ks_statistic(last, Coord::y)) << '\n'
            << "csv: " << csv.string() << '\n';
  if (svg) {
    const fs::path p = fs::path(c.output_dir) / "distribution.svg";
    std::ofstream os(p, std::ios::binary);
    if (!os) throw Error("cannot write " + p.string());
    os << histogram_svg(last);
    std::cout << "svg: " << p.string() << '\n';
  }
  const auto path = write_report(c, "distribution", r);
  std::cout << "report: " << path.string() << '\n';
  return kOk;
}

int cmd_verify(const RunConfig& c, bool quick) {
  acceptance::Suite suite(c);
  const auto results = suite.run(quick, [](const acceptance::CriterionResult& r) {
    std::cout << acceptance::format_line(r) << '\n' << std::flush;
  });
  const bool ok = acceptance::hard_ok(results);
  json r{{"quick", quick}, {"hard_pass", ok}, {"criteria", json::array()}};
  for (const auto& x : results) {
    json j = acceptance::to_json(x);
    j.erase("seconds");
    r["criteria"].push_back(j);
  }
  const auto path = write_report(c, "verify", r);
  std::cout << "verdict: " << (ok ? "all hard criteria pass" : "HARD FAILURE") << '\n'
            << "report: " << path.string() << '\n';
  return ok ? kOk : kAcceptance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"modsym-lab: hyperbolic cosets, modular symbols and their distribution"};
  app.require_subcommand(1);

  auto* enumerate = app.add_subcommand("enumerate", "enumerate cosets up to norm T");
  auto* symbols = app.add_subcommand("symbols", "modular symbols of the enumerated cosets");
  auto* eisenstein = app.add_subcommand("eisenstein", "plain or twisted hyperbolic Eisenstein series");
  auto* counting = app.add_subcommand("counting", "fit the counting law over T_grid");
  auto* moments_cmd = app.add_subcommand("moments", "fit a moment sum over T_grid");
  auto* distribution = app.add_subcommand("distribution", "distribution of normalized symbols");
  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  const std::array<CLI::App*, 7> subs{enumerate, symbols, eisenstein, counting, moments_cmd, distribution, verify};
  std::array<Common, 7> common;
  for (std::size_t k = 0; k < subs.size(); ++k) common[k].attach(subs[k]);

  std::string z = "0,1", s = "2,0", order = "0,0";
  eisenstein->add_option("--z", z, "point x,y");
  eisenstein->add_option("--s", s, "exponent re,im");
  eisenstein->add_option("--order", order, "twist order m,n");
  int m = 1, n = 0;
  moments_cmd->add_option("--m", m, "power of <gamma,alpha>^2");
  moments_cmd->add_option("--n", n, "power of <gamma,beta>^2");
  bool svg = false, quick = false;
  distribution->add_flag("--svg", svg, "emit a histogram SVG");
  verify->add_flag("--quick", quick, "hard oracle and identity criteria only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    std::size_t active = 0;
    while (active < subs.size() && !subs[active]->parsed()) ++active;
    if (active == subs.size()) return kConfig;
    const RunConfig cfg = common[active].resolve();
    if (*enumerate) return cmd_enumerate(cfg);
    if (*symbols) return cmd_symbols(cfg);
    if (*eisenstein) return cmd_eisenstein(cfg, z, s, order);
    if (*counting) return cmd_counting(cfg);
    if (*moments_cmd) return cmd_moments(cfg, m, n);
    if (*distribution) return cmd_distribution(cfg, svg);
    if (*verify) return cmd_verify(cfg, quick);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCompute;
  }
  return kConfig;
}
