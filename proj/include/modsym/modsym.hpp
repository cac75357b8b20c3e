#pragma once
/**
 * @brief Modular symbols <gamma, f> = -2 pi i int_{z0}^{gamma z0} f(z) dz,
 *        gamma1 selection, period lattice, Petersson norm, normalization.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "modsym/cuspform.hpp"
#include "modsym/enumerate.hpp"
#include "modsym/errors.hpp"
#include "modsym/halfplane.hpp"
#include "modsym/io.hpp"
#include "modsym/numeric.hpp"

namespace modsym {

struct SymbolValue {
  GroupElement gamma;
  cplx value;
  double abs_err = 0.0;
};

/// Coefficients needed for a symbol with lower-left entry c at 10^-D.
inline i64 symbol_terms(i64 c, int digits) {
  if (c == 0) return 0;
  const double cd = static_cast<double>(c);
  const double pre = std::log(4.0 * (cd / (2.0 * std::numbers::pi) + 1.0));
  const double need = cd * (pre + digits * std::numbers::ln10) / (2.0 * std::numbers::pi);
  i64 M = std::max<i64>(0, static_cast<i64>(std::ceil(need)) - 1);
  auto tail = [&](i64 m) {
    return 4.0 * (cd / (2.0 * std::numbers::pi) + 1.0) *
           std::exp(-2.0 * std::numbers::pi * static_cast<double>(m + 1) / cd);
  };
  const double target = std::pow(10.0, -digits);
  while (M > 0 && tail(M - 1) <= target) --M;
  while (tail(M) > target) ++M;
  return M;
}

/// Two-point evaluation at z0 = (-d + i)/c and gamma z0 = (a + i)/c.
inline SymbolValue symbol(const GroupElement& gamma, const QExpansion& q, int digits) {
  if (gamma.c == 0) return {gamma, {0.0, 0.0}, 0.0};
  if (gamma.c % q.level() != 0)
    throw DomainError("symbol: " + gamma.str() + " is not in Gamma_0(" + std::to_string(q.level()) + ")");
  const i64 c = gamma.c;
  const i64 M = symbol_terms(c, digits);
  if (M > q.M()) throw InsufficientCoefficients(M, q.M());
  const double cd = static_cast<double>(c);
  const double two_pi = 2.0 * std::numbers::pi;
  const double r = std::exp(-two_pi / cd);
  // Phase numerators modulo c: e^{2 pi i n z0} has phase -n d / c, e^{2 pi i n gamma z0} has n a / c.
  const i64 u = ((-gamma.d) % c + c) % c;
  const i64 v = (gamma.a % c + c) % c;
  const cplx s1 = std::polar(r, two_pi * static_cast<double>(u) / cd);
  const cplx s2 = std::polar(r, two_pi * static_cast<double>(v) / cd);
  constexpr i64 kBlock = 64;
  CompensatedSum<cplx> acc;
  double abs_sum = 0.0;
  cplx w1, w2;
  for (i64 n0 = 1; n0 <= M; n0 += kBlock) {
    const double rn = std::exp(-two_pi * static_cast<double>(n0) / cd);
    const i64 pu = static_cast<i64>((static_cast<i128>(n0) * u) % c);
    const i64 pv = static_cast<i64>((static_cast<i128>(n0) * v) % c);
    w1 = std::polar(rn, two_pi * static_cast<double>(pu) / cd);
    w2 = std::polar(rn, two_pi * static_cast<double>(pv) / cd);
    const i64 n1 = std::min(M, n0 + kBlock - 1);
    double br = 0.0, bi = 0.0, babs = 0.0, rr = rn;
    for (i64 n = n0; n <= n1; ++n) {
      const double an = static_cast<double>(q.a(n)) / static_cast<double>(n);
      const cplx diff = w1 - w2;
      br += an * diff.real();
      bi += an * diff.imag();
      babs += std::abs(an) * rr;
      w1 *= s1;
      w2 *= s2;
      rr *= r;
    }
    acc.add({br, bi});
    abs_sum += babs;
  }
  const double tail = 4.0 * (cd / two_pi + 1.0) * std::exp(-two_pi * static_cast<double>(M + 1) / cd);
  // Each term carries <= ~4 (kBlock + 2) eps relative error from the recurrence and block sum.
  const double rounding = 2.0 * abs_sum * 8.0 * (kBlock + 4) * std::numeric_limits<double>::epsilon();
  return {gamma, acc.value(), tail + rounding};
}

// ---------------------------------------------------------------------------
// Symbol tables and the symbol cache.

class SymbolTable {
 public:
  SymbolTable() = default;
  explicit SymbolTable(int digits) : digits_(digits) {}

  int digits() const { return digits_; }
  std::size_t size() const { return map_.size(); }
  bool contains(const GroupElement& g) const { return map_.count(g) != 0; }
  const SymbolValue& at(const GroupElement& g) const {
    auto it = map_.find(g);
    if (it == map_.end()) throw MissingSymbols("no symbol for " + g.str());
    return it->second;
  }
  void insert(const SymbolValue& s) { map_[s.gamma] = s; }
  const std::map<GroupElement, SymbolValue>& values() const { return map_; }

 private:
  int digits_ = 10;
  std::map<GroupElement, SymbolValue> map_;
};

/// Computes the symbols for every rep not yet in the table.
inline void fill_symbols(SymbolTable& table, const std::vector<CosetRep>& reps, const QExpansion& q,
                         unsigned threads = 1) {
  std::vector<GroupElement> todo;
  for (const auto& r : reps)
    if (!table.contains(r.rep)) todo.push_back(r.rep);
  std::vector<SymbolValue> out(todo.size());
  parallel_for(todo.size(), threads, [&](std::size_t i) { out[i] = symbol(todo[i], q, table.digits()); });
  for (const auto& s : out) table.insert(s);
}

/// Largest coefficient index needed for the reps at the given precision.
inline i64 required_coefficients(const std::vector<CosetRep>& reps, int digits) {
  i64 c = 0;
  for (const auto& r : reps) c = std::max(c, r.rep.c);
  return std::max<i64>(1, symbol_terms(c, digits));
}

inline void save_symbols(const SymbolTable& t, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path.string());
  os << "# modsym cache v1; D=" << t.digits() << '\n';
  for (const auto& [g, s] : t.values()) {
    os << g.a << ',' << g.b << ',' << g.c << ',' << g.d << ',' << detail::format_double(s.value.real()) << ','
       << detail::format_double(s.value.imag()) << ',' << detail::format_double(s.abs_err) << '\n';
  }
}

inline SymbolTable load_symbols(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open symbol cache " + path.string());
  std::string line;
  if (!std::getline(is, line)) throw FormatError("empty symbol cache");
  const std::string prefix = "# modsym cache v1; D=";
  if (line.rfind(prefix, 0) != 0) throw FormatError("bad symbol cache header: " + line);
  SymbolTable t(static_cast<int>(detail::parse_int(detail::trim(line.substr(prefix.size())))));
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto p = detail::split(line, ',');
    if (p.size() != 7) throw FormatError("symbol cache row needs 7 fields: " + line);
    GroupElement g;
    try {
      g = GroupElement(detail::parse_int(p[0]), detail::parse_int(p[1]), detail::parse_int(p[2]),
                       detail::parse_int(p[3]));
    } catch (const DomainError& e) {
      throw FormatError(std::string("symbol cache row: ") + e.what());
    }
    t.insert({g, {detail::parse_real(p[4]), detail::parse_real(p[5])}, detail::parse_real(p[6])});
  }
  return t;
}

// ---------------------------------------------------------------------------
// gamma1 selection.

/// All elements of Gamma_0(N) with entries bounded by E in absolute value.
inline std::vector<GroupElement> small_pool(i64 level, i64 E) {
  std::vector<GroupElement> pool;
  for (i64 b = -E; b <= E; ++b) pool.emplace_back(1, b, 0, 1);
  for (i64 c = level; c <= E; c += level) {
    for (i64 a = -E; a <= E; ++a) {
      for (i64 d = -E; d <= E; ++d) {
        const i64 num = a * d - 1;
        if (num % c != 0) continue;
        const i64 b = num / c;
        if (std::abs(b) <= E) pool.emplace_back(a, b, c, d);
      }
    }
  }
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  return pool;
}

struct Gamma1Choice {
  HyperbolicContext context;
  GroupElement g, h;
};

/// Commutator of the first pair of hyperbolic pool elements (ordered by norm
/// at i, then entries) whose commutator is hyperbolic.
inline Gamma1Choice build_gamma1(std::vector<GroupElement> pool) {
  std::vector<GroupElement> hyp;
  for (const auto& m : pool)
    if (std::abs(m.trace()) > 2) hyp.push_back(m);
  std::sort(hyp.begin(), hyp.end(), [](const GroupElement& x, const GroupElement& y) {
    const i128 nx = norm_sq_at_i(x), ny = norm_sq_at_i(y);
    if (nx != ny) return nx < ny;
    return x < y;
  });
  hyp.erase(std::unique(hyp.begin(), hyp.end()), hyp.end());
  for (std::size_t i = 0; i < hyp.size(); ++i) {
    for (std::size_t j = i + 1; j < hyp.size(); ++j) {
      const GroupElement com = hyp[i] * hyp[j] * hyp[i].inverse() * hyp[j].inverse();
      if (std::abs(com.trace()) > 2 && com.c != 0) return {analyze_hyperbolic(com), hyp[i], hyp[j]};
    }
  }
  throw NoSuitablePair("no pair of hyperbolic pool elements has a hyperbolic commutator");
}

/// Default testbed context: commutator of the two smallest hyperbolic elements.
inline Gamma1Choice default_gamma1(i64 level) { return build_gamma1(small_pool(level, 2 * level)); }

// ---------------------------------------------------------------------------
// Period lattice.

struct PeriodLattice {
  cplx w1, w2;
  double covolume = 0.0;
  std::size_t used = 0;      // values inserted
  std::size_t outliers = 0;  // values rejected as non-members
};

namespace detail {

inline double cross(cplx u, cplx v) { return u.real() * v.imag() - u.imag() * v.real(); }
inline double dot(cplx u, cplx v) { return u.real() * v.real() + u.imag() * v.imag(); }

/// Lagrange-Gauss reduction: |w1| <= |w2| and |<w1,w2>| <= |w1|^2 / 2.
inline void gauss_reduce(cplx& w1, cplx& w2) {
  for (int it = 0; it < 1000; ++it) {
    if (std::norm(w1) > std::norm(w2)) std::swap(w1, w2);
    const double m = std::round(dot(w1, w2) / std::norm(w1));
    if (m == 0.0) break;
    w2 -= m * w1;
  }
  if (std::norm(w1) > std::norm(w2)) std::swap(w1, w2);
  if (cross(w1, w2) < 0) w2 = -w2;
}

/// Coordinates of v in the basis (w1, w2).
inline std::pair<double, double> coords(cplx v, cplx w1, cplx w2) {
  const double det = cross(w1, w2);
  return {cross(v, w2) / det, cross(w1, v) / det};
}

/// Basis of the integer lattice generated by vecs, as (g, y0), (0, h).
inline std::array<std::array<i64, 2>, 2> integer_basis(std::vector<std::array<i64, 2>> vecs) {
  // Euclid on first coordinates.
  std::array<i64, 2> lead{0, 0};
  std::vector<i64> ys;
  for (auto v : vecs) {
    while (v[0] != 0) {
      if (lead[0] == 0) {
        std::swap(lead, v);
        break;
      }
      const i64 qt = lead[0] / v[0];
      lead[0] -= qt * v[0];
      lead[1] -= qt * v[1];
      std::swap(lead, v);
    }
    if (v[0] == 0 && v[1] != 0) ys.push_back(v[1]);
  }
  i64 h = 0;
  for (i64 y : ys) h = std::gcd(h, y);
  if (lead[0] < 0) lead = {-lead[0], -lead[1]};
  if (h != 0) lead[1] = ((lead[1] % h) + h) % h;
  return {{lead, {0, h}}};
}

}  // namespace detail

/// Rank-2 lattice generated by the symbol values, with outlier rejection.
inline PeriodLattice period_lattice(const std::vector<SymbolValue>& symbols, double tol = 1e-6,
                                    i64 max_index = 2000) {
  std::vector<cplx> vals;
  for (const auto& s : symbols)
    if (std::abs(s.value) > 10.0 * s.abs_err && std::abs(s.value) > tol) vals.push_back(s.value);
  if (vals.size() < 2) throw DegenerateLattice("fewer than two nonzero symbol values");
  std::stable_sort(vals.begin(), vals.end(), [](cplx x, cplx y) { return std::norm(x) < std::norm(y); });

  cplx w1 = vals[0], w2{};
  bool found = false;
  for (std::size_t i = 1; i < vals.size(); ++i) {
    if (std::abs(detail::cross(w1, vals[i])) > 1e-6 * std::abs(w1) * std::abs(vals[i])) {
      w2 = vals[i];
      found = true;
      break;
    }
  }
  if (!found) throw DegenerateLattice("symbol values are real-proportional");
  detail::gauss_reduce(w1, w2);

  PeriodLattice L;
  for (const cplx v : vals) {
    auto [x, y] = detail::coords(v, w1, w2);
    const double cx = tol / std::abs(w1) + 1e-9, cy = tol / std::abs(w2) + 1e-9;
    if (std::abs(x - std::round(x)) <= cx && std::abs(y - std::round(y)) <= cy) {
      ++L.used;
      continue;
    }
    // Find the smallest denominator making v a rational combination.
    i64 den = 0;
    for (i64 qd = 2; qd <= max_index; ++qd) {
      const double qx = x * static_cast<double>(qd), qy = y * static_cast<double>(qd);
      if (std::abs(qx - std::round(qx)) <= cx * static_cast<double>(qd) &&
          std::abs(qy - std::round(qy)) <= cy * static_cast<double>(qd)) {
        den = qd;
        break;
      }
    }
    if (den == 0) {
      ++L.outliers;
      continue;
    }
    const auto B = detail::integer_basis({{den, 0},
                                          {0, den},
                                          {static_cast<i64>(std::llround(x * static_cast<double>(den))),
                                           static_cast<i64>(std::llround(y * static_cast<double>(den)))}});
    const double dd = static_cast<double>(den);
    const cplx n1 = (static_cast<double>(B[0][0]) * w1 + static_cast<double>(B[0][1]) * w2) / dd;
    const cplx n2 = (static_cast<double>(B[1][0]) * w1 + static_cast<double>(B[1][1]) * w2) / dd;
    w1 = n1;
    w2 = n2;
    detail::gauss_reduce(w1, w2);
    ++L.used;
  }
  if (std::abs(detail::cross(w1, w2)) <= tol * tol) throw DegenerateLattice("lattice collapsed");
  L.w1 = w1;
  L.w2 = w2;
  L.covolume = std::abs(detail::cross(w1, w2));
  return L;
}

/// Distance from v to the nearest lattice point.
inline double lattice_distance(const PeriodLattice& L, cplx v) {
  auto [x, y] = detail::coords(v, L.w1, L.w2);
  double best = std::numeric_limits<double>::infinity();
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j) {
      const cplx p = (std::round(x) + i) * L.w1 + (std::round(y) + j) * L.w2;
      best = std::min(best, std::abs(v - p));
    }
  return best;
}

// ---------------------------------------------------------------------------
// Petersson norm.

enum class NormMethod { lattice_area, quadrature };

struct PeterssonNorm {
  double value = 0.0;  // ||f||^2
  NormMethod method = NormMethod::lattice_area;
};

inline PeterssonNorm petersson_norm(const PeriodLattice& L) {
  return {L.covolume / (4.0 * std::numbers::pi * std::numbers::pi), NormMethod::lattice_area};
}

/// Integral of |f|^2 dx dy over Gamma_0(N)\H for prime N, summed over the
/// N+1 translates sigma F of the modular fundamental domain.
inline PeterssonNorm petersson_norm_quadrature(const QExpansion& q, double tol = 1e-8, double y_max = 40.0) {
  const i64 N = q.level();
  std::vector<RealMatrix> reps{{1, 0, 0, 1}};
  for (i64 k = 0; k < N; ++k) reps.push_back({0, -1, 1, static_cast<double>(k)});
  auto h = [&](const RealMatrix& s, double x, double y) {
    const HPoint w = act(s, HPoint(x, y));
    const cplx f = eval_f(q, w, 1e-14).value;
    return w.y * w.y * std::norm(f) / (y * y);
  };
  CompensatedSum<double> total;
  for (const auto& s : reps) {
    const double part = quad::integrate(
        [&](double x) {
          return quad::integrate([&](double y) { return h(s, x, y); }, std::sqrt(1.0 - x * x), y_max, tol, 15);
        },
        -0.5, 0.5, tol, 15);
    total.add(part);
  }
  return {total.value(), NormMethod::quadrature};
}

// ---------------------------------------------------------------------------
// Normalization.

struct NormalizedSymbol {
  GroupElement gamma;
  cplx bracket;  // sqrt(vol / log(norm^2)) * int f dz / ||f||
  cplx tilde;    // sqrt(vol / (8 pi^2 ||f||^2)) * <gamma, f>
  double norm = 1.0;
};

/// int_{z0}^{gamma z0} f dz from the symbol.
inline cplx symbol_integral(cplx sym) { return cplx(0.0, 1.0) * sym / (2.0 * std::numbers::pi); }

inline NormalizedSymbol normalize(const SymbolValue& sym, double norm_value, double vol, const PeterssonNorm& pn) {
  NormalizedSymbol out;
  out.gamma = sym.gamma;
  out.norm = norm_value;
  const double fn = std::sqrt(pn.value);
  out.tilde = std::sqrt(vol / (8.0 * std::numbers::pi * std::numbers::pi * pn.value)) * sym.value;
  if (norm_value <= 1.0) {
    out.bracket = 0.0;
  } else {
    out.bracket = std::sqrt(vol / std::log(norm_value * norm_value)) * symbol_integral(sym.value) / fn;
  }
  return out;
}

}  // namespace modsym
