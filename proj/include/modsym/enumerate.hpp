#pragma once
/**
 * @brief Coset enumeration of Gamma1\Gamma_0(N) ordered by the conjugated norm.
 *
 * Representatives are chosen in the window 1 <= |g rep g^-1 (i)| < mu, the
 * annulus fundamental domain of the cyclic group generated by gamma1 in
 * conjugated coordinates.
 */

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <cstdio>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "modsym/errors.hpp"
#include "modsym/halfplane.hpp"
#include "modsym/io.hpp"

namespace modsym {

struct CosetRep {
  GroupElement rep;
  RealMatrix conj;
  double norm = 0.0;
  HPoint z_ref;
};

struct EnumerationResult {
  i64 level = 11;
  HyperbolicContext context;
  double T = 0.0;
  HPoint z_ref;
  std::vector<CosetRep> reps;  // ascending norm, ties by integer entries
  bool complete = true;

  /// Reps with norm <= t (prefix of the sorted list).
  std::size_t count_upto(double t) const {
    return static_cast<std::size_t>(
        std::upper_bound(reps.begin(), reps.end(), t,
                         [](double v, const CosetRep& r) { return v < r.norm; }) -
        reps.begin());
  }
};

inline bool is_member(const GroupElement& m, i64 level) { return m.c % level == 0; }

/// Half-width of the tolerance band around the window boundary, in units of log|w|.
inline constexpr double kWindowBand = 1e-12;

namespace detail {

/// log|w| for w = conj(i), from the row norms of the conjugated matrix.
inline double log_abs_image_of_i(const RealMatrix& m) {
  const double top = m.a * m.a + m.b * m.b, bot = m.c * m.c + m.d * m.d;
  return 0.5 * std::log(top / bot);
}

inline bool entries_smaller(const GroupElement& x, const GroupElement& y) {
  auto key = [](const GroupElement& m) {
    return std::array<i64, 8>{std::abs(m.a), std::abs(m.b), std::abs(m.c), std::abs(m.d),
                              m.a, m.b, m.c, m.d};
  };
  return key(x) < key(y);
}

}  // namespace detail

/// The representative gamma1^k m lying in the canonical window.
inline CosetRep coset_canonicalize(const GroupElement& m, const HyperbolicContext& ctx,
                                   const HPoint& z_ref = HPoint{0.0, 1.0}) {
  const double lw = detail::log_abs_image_of_i(ctx.conjugate(m));
  const double u = lw / ctx.log_mu;
  i64 k = -static_cast<i64>(std::floor(u));
  GroupElement rep = k == 0 ? m : ctx.gamma1.pow(k) * m;
  double r = (lw + static_cast<double>(k) * ctx.log_mu) / ctx.log_mu;  // in [0, 1) up to rounding

  // Inside the band on either side of the boundary the two neighbouring
  // translates compete; the smaller entries win.
  if (r < kWindowBand || r > 1.0 - kWindowBand) {
    const GroupElement other = r < kWindowBand ? ctx.gamma1 * rep : ctx.gamma1.inverse() * rep;
    if (detail::entries_smaller(other, rep)) rep = other;
  }
  CosetRep out{rep, ctx.conjugate(rep), 0.0, z_ref};
  out.norm = norm_at(out.conj, z_ref);
  return out;
}

namespace detail {

/// Smallest eigenvalue of the quadratic form (c,d) -> |cz+d|^2.
inline double min_form_eigenvalue(const HPoint& z) {
  const double p = z.x * z.x + z.y * z.y, q = z.x, r = 1.0;
  const double tr = p + r, det = p * r - q * q;
  return 0.5 * (tr - std::sqrt(std::max(0.0, tr * tr - 4.0 * det)));
}

inline i64 floor_div(i64 a, i64 b) {
  i64 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

/// Extended Euclid: returns (x, y) with a x + c y = gcd(a, c) = 1 expected.
inline std::pair<i64, i64> ext_gcd(i64 a, i64 c, i64& g) {
  i64 old_r = a, r = c, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    const i64 q = old_r / r;
    std::tie(old_r, r) = std::make_pair(r, old_r - q * r);
    std::tie(old_s, s) = std::make_pair(s, old_s - q * s);
    std::tie(old_t, t) = std::make_pair(t, old_t - q * t);
  }
  if (old_r < 0) {
    old_r = -old_r;
    old_s = -old_s;
    old_t = -old_t;
  }
  g = old_r;
  return {old_s, old_t};
}

/// Integer interval [lo, hi] of t with |x0 + t*slope| <= bound (long double).
inline bool linear_range(long double x0, long double slope, long double bound, long double& lo,
                         long double& hi) {
  if (slope == 0) return std::abs(x0) <= bound && lo <= hi;
  long double t1 = (-bound - x0) / slope, t2 = (bound - x0) / slope;
  if (t1 > t2) std::swap(t1, t2);
  lo = std::max(lo, t1);
  hi = std::min(hi, t2);
  return lo <= hi;
}

inline constexpr long double kMaxEntry = 4.0e15L;  // int64 product headroom

inline i64 to_index(long double v) {
  if (!(std::abs(v) < kMaxEntry)) throw OverflowError("coset entry bound exceeds 64-bit capacity");
  return static_cast<i64>(v);
}

}  // namespace detail

/// All cosets of Gamma1\Gamma_0(N) whose canonical representative has conjugated
/// norm at z_ref at most T.
///
/// Let A = a'^2+b'^2 and C = c'^2+d'^2 for the conjugated rep. The window gives
/// C <= A < mu^2 C, the norm cut gives A C <= T^2 / kappa^2 (kappa the smallest
/// eigenvalue of the z_ref quadratic form), hence C <= T/kappa and A < mu T/kappa.
/// The columns of g*rep = conj*g are then bounded in norm and in product, which
/// confines each integer column (a, c), (b, d) to a hyperbolic region
/// |X| |Y| <= const, |X| <= const', |Y| <= const'' in the coordinates
/// X = lam (x - p_minus y), Y = nu (x - p_plus y). Columns (a, c) are scanned
/// exactly over that region; the second column is found on the solution line
/// of ad - bc = 1 and filtered the same way. A slack factor 2 is applied to
/// every bound.
inline EnumerationResult enumerate_cosets(i64 level, const HyperbolicContext& ctx, double T,
                                          const HPoint& z_ref = HPoint{0.0, 1.0}) {
  if (!is_member(ctx.gamma1, level))
    throw DomainError("gamma1 " + ctx.gamma1.str() + " is not in Gamma_0(" + std::to_string(level) + ")");
  EnumerationResult out;
  out.level = level;
  out.context = ctx;
  out.T = T;
  out.z_ref = z_ref;
  constexpr long double slack = 2.0L;
  const long double kappa = detail::min_form_eigenvalue(z_ref);
  if (T < kappa) return out;  // norm >= kappa sqrt(A C) >= kappa
  // norm >= kappa sqrt(A C), so A C <= (T / kappa)^2.
  const long double t_eff = static_cast<long double>(T) / kappa;
  const long double mu = ctx.mu;
  const long double col1 = std::hypot(ctx.lam, ctx.nu);
  const long double col2 = std::hypot(ctx.lam * ctx.pm, ctx.nu * ctx.pp);
  const long double big = std::sqrt(mu * t_eff) * slack;
  const long double small = std::sqrt(t_eff) * slack;
  const long double prod = t_eff * slack * slack;

  const long double lam = ctx.lam, nu = ctx.nu, pm = ctx.pm, pp = ctx.pp;
  const long double gap = pp - pm;

  std::set<GroupElement> found;
  auto consider = [&](const GroupElement& m) {
    const RealMatrix cm = ctx.conjugate(m);
    const double u = detail::log_abs_image_of_i(cm) / ctx.log_mu;
    if (u < -kWindowBand || u >= 1.0 + kWindowBand) return;
    const CosetRep rep = coset_canonicalize(m, ctx, z_ref);
    if (rep.norm <= T) found.insert(rep.rep);
  };

  // Column (x, y) = (a, c): |lam (x - pm y)| <= big*col1, |nu (x - pp y)| <= small*col1,
  // product <= prod*col1^2.
  const long double bx1 = big * col1 / lam;              // |x - pm y|
  const long double by1 = small * col1 / std::abs(nu);   // |x - pp y|
  const long double bxy1 = prod * col1 * col1 / (lam * std::abs(nu));
  const long double bx2 = big * col2, by2 = small * col2, bxy2 = prod * col2 * col2;

  // c = y ranges over multiples of the level; y (pp - pm) = (x - pm y) - (x - pp y).
  const i64 c_max = detail::to_index((bx1 + by1) / gap);

  auto scan_second_column = [&](i64 a, i64 c) {
    i64 gcd = 0;
    auto [s, t0] = detail::ext_gcd(a, c, gcd);
    if (gcd != 1) return;
    // a*s + c*t0 = 1 -> (b0, d0) = (-t0, s) gives a d0 - b0 c = 1.
    const i64 b0 = -t0, d0 = s;
    const long double X0 = lam * (b0 - pm * d0), Y0 = nu * (b0 - pp * d0);
    const long double Xs = lam * (a - pm * c), Ys = nu * (a - pp * c);
    long double lo = -std::numeric_limits<long double>::infinity();
    long double hi = std::numeric_limits<long double>::infinity();
    if (!detail::linear_range(X0, Xs, bx2, lo, hi)) return;
    if (!detail::linear_range(Y0, Ys, by2, lo, hi)) return;
    const i64 t_lo = detail::to_index(std::ceil(lo)), t_hi = detail::to_index(std::floor(hi));
    for (i64 t = t_lo; t <= t_hi; ++t) {
      const long double X = X0 + t * Xs, Y = Y0 + t * Ys;
      if (std::abs(X * Y) > bxy2) continue;
      const i64 b = b0 + t * a, d = d0 + t * c;
      consider(GroupElement(a, b, c, d));
    }
  };

  for (i64 c = 0; c <= c_max; c += level) {
    if (c == 0) {
      scan_second_column(1, 0);
      continue;
    }
    // u = x - pm c, v = x - pp c = u - gap c; need |u| <= bx1, |v| <= by1, |u v| <= bxy1.
    const long double h = gap * c / 2.0L;
    const long double mid = (pm + pp) * c / 2.0L;  // u v = (x - mid)^2 - h^2
    const long double outer = std::sqrt(h * h + bxy1);
    std::vector<std::pair<long double, long double>> ranges;
    if (h * h <= bxy1) {
      ranges.emplace_back(mid - outer, mid + outer);
    } else {
      const long double inner = std::sqrt(h * h - bxy1);
      ranges.emplace_back(mid - outer, mid - inner);
      ranges.emplace_back(mid + inner, mid + outer);
    }
    for (auto [lo, hi] : ranges) {
      lo = std::max({lo, pm * c - bx1, pp * c - by1});
      hi = std::min({hi, pm * c + bx1, pp * c + by1});
      if (lo > hi) continue;
      const i64 a_lo = detail::to_index(std::ceil(lo)), a_hi = detail::to_index(std::floor(hi));
      for (i64 a = a_lo; a <= a_hi; ++a) scan_second_column(a, c);
    }
  }

  out.reps.reserve(found.size());
  for (const auto& m : found) out.reps.push_back(coset_canonicalize(m, ctx, z_ref));
  std::sort(out.reps.begin(), out.reps.end(), [](const CosetRep& x, const CosetRep& y) {
    if (x.norm != y.norm) return x.norm < y.norm;
    return x.rep < y.rep;
  });
  return out;
}

/// Restricts a result to norm <= t (t must not exceed result.T).
inline EnumerationResult truncate(const EnumerationResult& r, double t) {
  if (t > r.T) throw IncompleteEnumeration("cannot extend an enumeration from T=" +
                                           std::to_string(r.T) + " to T=" + std::to_string(t));
  EnumerationResult out = r;
  out.T = t;
  out.reps.resize(r.count_upto(t));
  return out;
}

// ---------------------------------------------------------------------------
// Cache file.


inline std::string cache_header(const EnumerationResult& r) {
  const auto& g = r.context.gamma1;
  return "# modsym-lab coset cache v1; N=" + std::to_string(r.level) + "; gamma1=" +
         std::to_string(g.a) + "," + std::to_string(g.b) + "," + std::to_string(g.c) + "," +
         std::to_string(g.d) + "; zref=" + detail::format_double(r.z_ref.x) + "," +
         detail::format_double(r.z_ref.y) + "; T=" + detail::format_double(r.T);
}

inline void save_cache(const EnumerationResult& r, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot write cache " + path.string());
  os << cache_header(r) << '\n';
  for (const auto& rep : r.reps)
    os << rep.rep.a << ',' << rep.rep.b << ',' << rep.rep.c << ',' << rep.rep.d << '\n';
}

struct CacheHeader {
  i64 level = 0;
  GroupElement gamma1;
  HPoint z_ref;
  double T = 0.0;
};

inline CacheHeader parse_cache_header(const std::string& line) {
  const std::string prefix = "# modsym-lab coset cache v1;";
  if (line.rfind(prefix, 0) != 0) throw FormatError("bad coset cache header");
  CacheHeader h;
  bool have_n = false, have_g = false, have_z = false, have_t = false;
  for (const auto& field : detail::split(line.substr(prefix.size()), ';')) {
    const std::string f = detail::trim(field);
    const auto eq = f.find('=');
    if (eq == std::string::npos) throw FormatError("bad coset cache header field '" + f + "'");
    const std::string key = f.substr(0, eq), val = f.substr(eq + 1);
    if (key == "N") {
      h.level = detail::parse_int(val);
      have_n = true;
    } else if (key == "gamma1") {
      auto p = detail::split(val, ',');
      if (p.size() != 4) throw FormatError("gamma1 needs four entries");
      try {
        h.gamma1 = GroupElement(detail::parse_int(p[0]), detail::parse_int(p[1]),
                                detail::parse_int(p[2]), detail::parse_int(p[3]));
      } catch (const DomainError&) {
        throw FormatError("gamma1 in cache header does not have determinant 1");
      }
      have_g = true;
    } else if (key == "zref") {
      auto p = detail::split(val, ',');
      if (p.size() != 2) throw FormatError("zref needs two entries");
      try {
        h.z_ref = HPoint(detail::parse_real(p[0]), detail::parse_real(p[1]));
      } catch (const DomainError&) {
        throw FormatError("zref must lie in the upper half-plane");
      }
      have_z = true;
    } else if (key == "T") {
      h.T = detail::parse_real(val);
      have_t = true;
    } else {
      throw FormatError("unknown cache header field '" + key + "'");
    }
  }
  if (!(have_n && have_g && have_z && have_t)) throw FormatError("incomplete coset cache header");
  return h;
}

/// Loads a cache; floating fields are recomputed from the integer entries.
/// When `expected_level` / `expected_gamma1` are given they must match.
inline EnumerationResult load_cache(const std::filesystem::path& path,
                                    std::optional<i64> expected_level = std::nullopt,
                                    std::optional<GroupElement> expected_gamma1 = std::nullopt) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open cache " + path.string());
  std::string line;
  if (!std::getline(is, line)) throw FormatError("empty coset cache");
  const CacheHeader h = parse_cache_header(line);
  if (expected_level && *expected_level != h.level)
    throw ContextMismatch("cache level N=" + std::to_string(h.level) + " differs from requested N=" +
                          std::to_string(*expected_level));
  if (expected_gamma1 && !(*expected_gamma1 == h.gamma1))
    throw ContextMismatch("cache gamma1 " + h.gamma1.str() + " differs from requested " +
                          expected_gamma1->str());
  EnumerationResult r;
  r.level = h.level;
  r.context = analyze_hyperbolic(h.gamma1);
  if (!(r.context.gamma1 == h.gamma1)) throw FormatError("cache gamma1 is not in normalized form");
  r.T = h.T;
  r.z_ref = h.z_ref;
  std::set<GroupElement> seen;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto p = detail::split(line, ',');
    if (p.size() != 4) throw FormatError("cache line " + std::to_string(lineno) + ": expected a,b,c,d");
    GroupElement m;
    try {
      m = GroupElement(detail::parse_int(p[0]), detail::parse_int(p[1]), detail::parse_int(p[2]),
                       detail::parse_int(p[3]));
    } catch (const DomainError&) {
      throw FormatError("cache line " + std::to_string(lineno) + ": determinant is not 1");
    }
    if (!is_member(m, h.level) || !seen.insert(m).second)
      throw FormatError("cache line " + std::to_string(lineno) + ": not a distinct Gamma_0(N) element");
    CosetRep rep{m, r.context.conjugate(m), 0.0, h.z_ref};
    rep.norm = norm_at(rep.conj, h.z_ref);
    r.reps.push_back(rep);
  }
  std::sort(r.reps.begin(), r.reps.end(), [](const CosetRep& x, const CosetRep& y) {
    if (x.norm != y.norm) return x.norm < y.norm;
    return x.rep < y.rep;
  });
  return r;
}

}  // namespace modsym
