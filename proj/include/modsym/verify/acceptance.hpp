#pragma once
/**
 * @brief The acceptance suite: criteria 1-13 with pinned tolerances.
 *        Criteria 1-8 are hard; 9-13 are asymptotic trends that are reported.
 */

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "modsym/cuspform.hpp"
#include "modsym/eisenstein.hpp"
#include "modsym/enumerate.hpp"
#include "modsym/modsym.hpp"
#include "modsym/pipeline.hpp"
#include "modsym/stats.hpp"
#include "modsym/summatory.hpp"
#include "modsym/verify/oracles.hpp"

namespace modsym::acceptance {

namespace tol {
inline constexpr double kOracleT = 50.0;
inline constexpr double kOracleSeconds = 30.0;
inline constexpr double kAdditivityT = 200.0;
inline constexpr int kAdditivityPairs = 100;
inline constexpr double kAdditivityMaxC = 3e5;
inline constexpr double kAdditivityErr = 1e-8;
inline constexpr double kGamma1Symbol = 1e-10;
inline constexpr double kSymbolSeconds = 300.0;
inline constexpr double kAnnulus = 1e-8;
inline constexpr double kPdeSingle = 1e-5;
inline constexpr double kPdeFull = 1e-3;
inline constexpr double kPdeOrderLo = 3.0, kPdeOrderHi = 5.0;
inline constexpr double kPdeSeconds = 120.0;
inline constexpr double kMellinSlack = 2.0;
inline constexpr double kEpsRel = 1e-6;
inline constexpr double kPairing = 1e-12;
inline constexpr double kCountingRel = 0.10;
inline constexpr double kLatticeDist = 1e-5;
inline constexpr double kLatticeFraction = 0.99;
inline constexpr double kCovolumeRel = 1e-4;
inline constexpr double kMomentFitRel = 0.25;
inline constexpr double kOddFloor = 1e-12;
inline constexpr double kM2Rel = 0.20;
inline constexpr double kM4Rel = 0.30;
inline constexpr double kM11 = 0.1;
inline constexpr double kKsFinal = 0.15;
inline constexpr double kRectAbs = 0.05;
}  // namespace tol

struct CriterionResult {
  CriterionResult() = default;
  CriterionResult(int i, std::string n, bool h) : id(i), name(std::move(n)), hard(h) {}

  int id = 0;
  std::string name;
  bool hard = true;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

inline nlohmann::ordered_json to_json(const CriterionResult& r) {
  return {{"id", r.id}, {"name", r.name}, {"class", r.hard ? "hard" : "trend"}, {"pass", r.pass},
          {"detail", r.detail}, {"seconds", r.seconds}};
}

/// Shared artifacts: one workspace enumerated to the largest T any criterion needs.
class Suite {
 public:
  explicit Suite(RunConfig cfg = {}) : ws_(std::move(cfg)) {}

  Workspace& workspace() { return ws_; }

  std::vector<CriterionResult> run(bool quick, const std::function<void(const CriterionResult&)>& on_result = {}) {
    struct Task {
      CriterionResult meta;
      std::function<CriterionResult()> fn;
    };
    std::vector<Task> tasks{
        {{1, "enumeration oracle (T <= 50)", true}, [&] { return c1_enumeration_oracle(); }},
        {{2, "symbol identities", true}, [&] { return c2_symbol_identities(); }},
        {{3, "annulus quadrature = 2 log mu", true}, [&] { return c3_annulus(); }},
        {{4, "PDE identity", true}, [&] { return c4_pde(); }},
        {{5, "Mellin estimates and sandwich", true}, [&] { return c5_mellin(); }},
        {{6, "eps-consistency", true}, [&] { return c6_eps(); }},
        {{7, "pairing identities", true}, [&] { return c7_pairings(); }},
        {{8, "pairing-count combinatorics", true}, [&] { return c8_pairing_count(); }}};
    if (!quick) {
      tasks.push_back({{9, "counting law", false}, [&] { return c9_counting(); }});
      tasks.push_back({{10, "period lattice membership", false}, [&] { return c10_lattice(); }});
      tasks.push_back({{11, "moment sums", false}, [&] { return c11_moment_sums(); }});
      tasks.push_back({{12, "Gaussian limit", false}, [&] { return c12_gaussian(); }});
      tasks.push_back({{13, "growth bound trend", false}, [&] { return c13_growth(); }});
    }
    std::vector<CriterionResult> out;
    for (auto& t : tasks) {
      const auto t0 = std::chrono::steady_clock::now();
      CriterionResult r = t.meta;
      try {
        r = t.fn();
      } catch (const std::exception& e) {
        r = t.meta;
        r.pass = false;
        r.detail = std::string("exception: ") + e.what();
      }
      r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (on_result) on_result(r);
      out.push_back(r);
    }
    return out;
  }

  // -------------------------------------------------------------------------
  CriterionResult c1_enumeration_oracle() {
    CriterionResult r{1, "enumeration oracle (T <= 50)", true};
    const auto t0 = std::chrono::steady_clock::now();
    const auto& ctx = ws_.context();
    const auto e = enumerate_cosets(ws_.config().level, ctx, tol::kOracleT);
    std::set<GroupElement> got;
    for (const auto& c : e.reps) got.insert(c.rep);
    const i64 B = oracle::coset_box_bound(ctx, tol::kOracleT);
    const auto want = oracle::box_cosets(ws_.config().level, ctx, tol::kOracleT, B);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.pass = got == want && got.size() == e.reps.size() && secs < tol::kOracleSeconds;
    std::ostringstream os;
    os << "enumerated " << got.size() << ", oracle " << want.size() << " (box bound " << B << "), "
       << (got == want ? "sets equal" : "sets differ") << ", runtime "
       << (secs < tol::kOracleSeconds ? "within " : "over ") << tol::kOracleSeconds << " s";
    r.detail = os.str();
    return r;
  }

  CriterionResult c2_symbol_identities() {
    CriterionResult r{2, "symbol identities", true};
    const auto t0 = std::chrono::steady_clock::now();
    const auto e = ws_.enumeration(tol::kAdditivityT);
    const auto& ctx = ws_.context();
    const int D = 10;
    // Zero cases.
    const auto& q0 = ws_.coefficients(1);
    bool zeros = true;
    const auto id = symbol(GroupElement::identity(), q0, D);
    zeros = zeros && id.value == cplx(0.0, 0.0) && id.abs_err == 0.0;
    for (i64 b = -5; b <= 5; ++b) {
      if (b == 0) continue;
      const auto s = symbol(GroupElement(1, b, 0, 1), q0, D);
      zeros = zeros && s.value == cplx(0.0, 0.0) && s.abs_err == 0.0;
    }
    // Additivity over random pairs whose product stays affordable.
    std::mt19937_64 gen(20240611);
    std::uniform_int_distribution<std::size_t> pick(0, e.reps.size() - 1);
    std::vector<std::pair<GroupElement, GroupElement>> pairs;
    for (int guard = 0; pairs.size() < static_cast<std::size_t>(tol::kAdditivityPairs) && guard < 1000000; ++guard) {
      const auto& x = e.reps[pick(gen)].rep;
      const auto& y = e.reps[pick(gen)].rep;
      const GroupElement p = x * y;
      if (static_cast<double>(p.c) <= tol::kAdditivityMaxC) pairs.emplace_back(x, y);
    }
    i64 M = symbol_terms(ctx.gamma1.c, 12);
    for (const auto& [x, y] : pairs)
      M = std::max({M, symbol_terms(x.c, D), symbol_terms(y.c, D), symbol_terms((x * y).c, D)});
    const auto& q = ws_.coefficients(M);
    double worst_excess = -1e300, worst_err = 0.0, worst_resid = 0.0;
    bool add_ok = pairs.size() == static_cast<std::size_t>(tol::kAdditivityPairs);
    for (const auto& [x, y] : pairs) {
      const auto sx = symbol(x, q, D), sy = symbol(y, q, D), sxy = symbol(x * y, q, D);
      const double resid = std::abs(sxy.value - sx.value - sy.value);
      const double err = sx.abs_err + sy.abs_err + sxy.abs_err;
      add_ok = add_ok && resid <= err && err <= tol::kAdditivityErr;
      worst_excess = std::max(worst_excess, resid - err);
      worst_err = std::max(worst_err, err);
      worst_resid = std::max(worst_resid, resid);
    }
    const auto g1 = symbol(ctx.gamma1, q, 12);
    const bool g1_ok = std::abs(g1.value) <= tol::kGamma1Symbol && g1.abs_err <= tol::kGamma1Symbol;
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.pass = zeros && add_ok && g1_ok && secs < tol::kSymbolSeconds;
    std::ostringstream os;
    os << "zeros " << (zeros ? "exact" : "NOT exact") << "; " << pairs.size() << " pairs, max residual " << worst_resid
       << " vs max summed error " << worst_err << "; |<gamma1,f>| = " << std::abs(g1.value) << " (err " << g1.abs_err
       << ")";
    r.detail = os.str();
    return r;
  }

  CriterionResult c3_annulus() {
    CriterionResult r{3, "annulus quadrature = 2 log mu", true};
    const double mu = ws_.context().mu;
    const double de = std::abs(annulus_integral(std::numbers::e) - 2.0);
    const double dm = std::abs(annulus_integral(mu) - 2.0 * std::log(mu));
    r.pass = de <= tol::kAnnulus && dm <= tol::kAnnulus;
    std::ostringstream os;
    os << "|I(e) - 2| = " << de << ", |I(mu) - 2 log mu| = " << dm;
    r.detail = os.str();
    return r;
  }

  CriterionResult c4_pde() {
    CriterionResult r{4, "PDE identity", true};
    const auto t0 = std::chrono::steady_clock::now();
    const double single = check_pde_single(HPoint(1.0, 2.0), 4.0, 1e-3).residual;
    const auto e = ws_.enumeration(200.0);
    const HPoint z(0.3, 1.5);
    std::vector<double> hs{0.1, 0.05, 0.025, 0.0125}, res;
    for (double h : hs) res.push_back(check_pde(z, 4.0, h, e).residual);
    bool order_ok = true;
    std::ostringstream ratios;
    for (std::size_t i = 1; i < res.size(); ++i) {
      const double q = res[i - 1] / res[i];
      ratios << (i > 1 ? ", " : "") << q;
      order_ok = order_ok && q >= tol::kPdeOrderLo && q <= tol::kPdeOrderHi;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.pass = single <= tol::kPdeSingle && res.back() <= tol::kPdeFull && order_ok && secs < tol::kPdeSeconds;
    std::ostringstream os;
    os << "single-term " << single << "; full sum " << res.back() << " at h = " << hs.back()
       << "; halving ratios " << ratios.str();
    r.detail = os.str();
    return r;
  }

  CriterionResult c5_mellin() {
    CriterionResult r{5, "Mellin estimates and sandwich", true};
    bool ok = true;
    std::ostringstream os;
    for (double U : {10.0, 100.0}) {
      const double d1 = std::abs(mellin_RU(U, 1.0) - 1.0);
      const double d2 = std::abs(mellin_RU(U, 2.0) - 0.5);
      ok = ok && d1 <= tol::kMellinSlack / U && d2 <= tol::kMellinSlack / U;
      os << "U=" << U << ": |R(1)-1|=" << d1 << ", |R(2)-1/2|=" << d2 << "; ";
    }
    const auto e = ws_.enumeration(1200.0);
    std::vector<cplx> ones(e.reps.size(), 1.0);
    std::vector<double> norms;
    for (const auto& c : e.reps) norms.push_back(c.norm);
    bool sandwich = true;
    for (double U : {10.0, 100.0})
      for (double T : {250.0, 500.0, 1000.0}) {
        const double lo = smoothed_sum(ones, norms, U, T, CutoffVariant::lower, e.T).real();
        const double hi = smoothed_sum(ones, norms, U, T, CutoffVariant::upper, e.T).real();
        const double sh = sharp_sum(ones, norms, T).real();
        sandwich = sandwich && lo <= sh && sh <= hi;
      }
    os << "sandwich " << (sandwich ? "holds" : "FAILS");
    r.pass = ok && sandwich;
    r.detail = os.str();
    return r;
  }

  CriterionResult c6_eps() {
    CriterionResult r{6, "eps-consistency", true};
    const auto e = ws_.enumeration(200.0);
    const auto& t = ws_.symbols(e);
    double worst = 0.0;
    for (Axis ax : {Axis::alpha, Axis::beta})
      worst = std::max(worst, eps_consistency(HPoint(0.0, 2.0), 3.0, ax, 1e-4, e, t).rel_diff);
    r.pass = worst <= tol::kEpsRel;
    std::ostringstream os;
    os << "max relative deviation over both axes " << worst << " (z = 2i, s = 3, eps = 1e-4, T = 200)";
    r.detail = os.str();
    return r;
  }

  CriterionResult c7_pairings() {
    CriterionResult r{7, "pairing identities", true};
    const auto& q = ws_.coefficients(20000);
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> ux(-0.5, 0.5), uy(0.3, 2.0);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      const HPoint z(ux(gen), uy(gen));
      const cplx f = eval_f(q, z, 1e-14).value;
      const auto [al, be] = real_imag_forms(f);
      const double ref = z.y * z.y * std::norm(f);
      const double scale = 1.0 + ref;
      worst = std::max({worst, std::abs(pairing(al, al, z.y) - ref) / scale,
                        std::abs(pairing(be, be, z.y) - ref) / scale, std::abs(pairing(al, be, z.y)) / scale});
    }
    r.pass = worst <= tol::kPairing;
    r.detail = "max deviation " + detail::format_double(worst) + " over 20 points";
    return r;
  }

  CriterionResult c8_pairing_count() {
    CriterionResult r{8, "pairing-count combinatorics", true};
    bool ok = true;
    std::ostringstream os;
    for (int m = 1; m <= 3; ++m) {
      const long long direct = oracle::count_increasing_pairings(m);
      const double formula = pairing_count(m);
      ok = ok && static_cast<double>(direct) == formula;
      os << "m=" << m << ": " << direct << " vs " << formula << "; ";
    }
    r.pass = ok;
    r.detail = os.str();
    return r;
  }

  // -------------------------------------------------------------------------
  CriterionResult c9_counting() {
    CriterionResult r{9, "counting law", false};
    const auto e = ws_.enumeration(2000.0);
    const double c = counting_constant(e.context, e.z_ref.y, ws_.volume());
    auto dev = [&](double T) { return std::abs(static_cast<double>(e.count_upto(T)) / T - c) / c; };
    const double d500 = dev(500.0), d2000 = dev(2000.0);
    r.pass = d2000 <= tol::kCountingRel && d2000 < d500;
    std::ostringstream os;
    os << "N(2000)/2000 = " << static_cast<double>(e.count_upto(2000.0)) / 2000.0 << " vs " << c
       << "; rel dev " << d500 << " (T=500) -> " << d2000 << " (T=2000)";
    r.detail = os.str();
    return r;
  }

  CriterionResult c10_lattice() {
    CriterionResult r{10, "period lattice membership", false};
    auto lattice_at = [&](double T) {
      const auto e = ws_.enumeration(T);
      const auto& t = ws_.symbols(e);
      std::vector<SymbolValue> v;
      for (const auto& c : e.reps) v.push_back(t.at(c.rep));
      return std::make_pair(period_lattice(v), v);
    };
    const auto [L250, v250] = lattice_at(250.0);
    const auto [L500, v500] = lattice_at(500.0);
    std::size_t inside = 0;
    for (const auto& s : v500)
      if (lattice_distance(L500, s.value) <= tol::kLatticeDist) ++inside;
    const double frac = static_cast<double>(inside) / static_cast<double>(v500.size());
    const double cov = std::abs(L500.covolume - L250.covolume) / L500.covolume;
    r.pass = frac >= tol::kLatticeFraction && cov <= tol::kCovolumeRel;
    std::ostringstream os;
    os.precision(12);
    os << inside << "/" << v500.size() << " within 1e-5; covolume " << L250.covolume << " (T=250) vs "
       << L500.covolume << " (T=500), rel change " << cov;
    r.detail = os.str();
    return r;
  }

  CriterionResult c11_moment_sums() {
    CriterionResult r{11, "moment sums", false};
    const std::vector<double> grid{250.0, 500.0, 1000.0, 2000.0};
    const auto e = ws_.enumeration(grid.back());
    const auto& t = ws_.symbols(e);
    const double pn = ws_.petersson(e).value;
    bool ok = true;
    std::ostringstream os;
    for (auto [m, n] : {std::pair{1, 0}, std::pair{0, 1}}) {
      const auto f = moment_sum(m, n, e, t, grid, pn, ws_.volume());
      const bool sign_ok = (f.leading_coeff > 0) == (f.paper_coeff > 0);
      ok = ok && f.rel_dev <= tol::kMomentFitRel && sign_ok;
      os << "(m,n)=(" << m << "," << n << "): fitted " << f.leading_coeff << " vs " << f.paper_coeff << ", ratio "
         << f.leading_coeff / f.paper_coeff << ", sign " << (sign_ok ? "agrees" : "differs") << "; ";
    }
    for (auto [p, q] : {std::pair{1, 0}, std::pair{0, 1}}) {
      const auto d = odd_moment_decay(p, q, e, t, grid);
      bool mono = true;
      for (std::size_t i = 1; i < d.size(); ++i) mono = mono && d[i] <= d[i - 1] + tol::kOddFloor;
      ok = ok && mono;
      os << "odd (" << p << "," << q << "):";
      for (double v : d) os << ' ' << v;
      os << (mono ? " decays; " : " NOT monotone; ");
    }
    r.pass = ok;
    r.detail = os.str();
    return r;
  }

  CriterionResult c12_gaussian() {
    CriterionResult r{12, "Gaussian limit", false};
    const std::vector<double> grid{250.0, 500.0, 1000.0, 2000.0};
    const auto e = ws_.enumeration(grid.back());
    const auto& t = ws_.symbols(e);
    const auto pn = ws_.petersson(e);
    const auto normalized = normalize_all(e, t, ws_.volume(), pn);
    std::vector<EmpiricalDistribution> ds;
    for (double T : grid) ds.push_back(build_distribution(e, normalized, T));
    const auto& first = ds.front();
    const auto& last = ds.back();
    auto closer = [&](int n, int m) {
      const double L = moment_limit(n, m);
      return std::abs(moments(last, n, m) - L) < std::abs(moments(first, n, m) - L);
    };
    const double m20 = moments(last, 2, 0), m02 = moments(last, 0, 2), m40 = moments(last, 4, 0);
    const double m11 = moments(last, 1, 1);
    const bool mom_ok = std::abs(m20 - 1.0) <= tol::kM2Rel && std::abs(m02 - 1.0) <= tol::kM2Rel &&
                        std::abs(m40 - 3.0) <= tol::kM4Rel * 3.0 && closer(2, 0) && closer(0, 2) && closer(4, 0) &&
                        std::abs(m11) <= tol::kM11;
    bool ks_ok = true;
    std::ostringstream ks;
    for (Coord axis : {Coord::x, Coord::y}) {
      ks << (axis == Coord::x ? " x:" : " y:");
      double prev = 2.0;
      for (const auto& d : ds) {
        const double k = ks_statistic(d, axis);
        ks << ' ' << k;
        ks_ok = ks_ok && k < prev;
        prev = k;
      }
      ks_ok = ks_ok && prev <= tol::kKsFinal;
    }
    bool rect_ok = true;
    std::ostringstream rs;
    for (const Rect& R : {Rect{-1, 1, -1, 1}, Rect{0, 1, 0, 1}}) {
      const double emp = rectangle_prob(last, R), g = gaussian_rect(R);
      rect_ok = rect_ok && std::abs(emp - g) <= tol::kRectAbs;
      rs << ' ' << emp << " vs " << g << ';';
    }
    r.pass = mom_ok && ks_ok && rect_ok;
    std::ostringstream os;
    os << "T=" << grid.back() << ": M20=" << m20 << " M02=" << m02 << " M40=" << m40 << " M11=" << m11
       << " (first T: M20=" << moments(first, 2, 0) << " M02=" << moments(first, 0, 2)
       << " M40=" << moments(first, 4, 0) << "); KS" << ks.str() << "; rectangles" << rs.str()
       << " [moments " << (mom_ok ? "ok" : "FAIL") << ", KS " << (ks_ok ? "ok" : "FAIL") << ", rect "
       << (rect_ok ? "ok" : "FAIL") << "]";
    r.detail = os.str();
    return r;
  }

  CriterionResult c13_growth() {
    CriterionResult r{13, "growth bound trend", false};
    const std::vector<double> grid{125.0, 250.0, 500.0, 1000.0};
    const auto e = ws_.enumeration(grid.back());
    const auto& t = ws_.symbols(e);
    std::vector<double> ratios;
    for (double T : grid) {
      double mx = 0.0;
      for (const auto& c : e.reps) {
        if (c.norm > T) break;
        mx = std::max(mx, std::abs(t.at(c.rep).value));
      }
      ratios.push_back(mx / std::pow(T, 0.1));
    }
    bool ok = true;
    for (std::size_t i = 1; i < ratios.size(); ++i) ok = ok && ratios[i] <= ratios[i - 1];
    r.pass = ok;
    std::ostringstream os;
    os << "max|<gamma,f>|/T^0.1 at T=125,250,500,1000:";
    for (double v : ratios) os << ' ' << v;
    r.detail = os.str();
    return r;
  }

 private:
  Workspace ws_;
};

/// One line per criterion.
inline std::string format_line(const CriterionResult& r) {
  std::ostringstream os;
  os << "criterion " << (r.id < 10 ? " " : "") << r.id << " [" << (r.hard ? "hard " : "trend") << "] "
     << (r.pass ? "PASS" : "FAIL") << "  " << r.name << " -- " << r.detail;
  return os.str();
}

inline bool hard_ok(const std::vector<CriterionResult>& rs) {
  for (const auto& r : rs)
    if (r.hard && !r.pass) return false;
  return true;
}

}  // namespace modsym::acceptance
