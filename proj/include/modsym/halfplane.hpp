#pragma once
/**
 * @brief 2x2 matrix algebra on the upper half-plane.
 *
 * Exact integer matrices (GroupElement) for group elements, double-precision
 * RealMatrix for conjugated coordinates, Moebius action, the coset weight
 * Im(mz)/|mz| and the norm |az+b||cz+d|, and hyperbolic-element analysis.
 */

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>
#include <tuple>

#include "modsym/errors.hpp"

namespace modsym {

using i64 = std::int64_t;
using i128 = __int128;
using cplx = std::complex<double>;

namespace detail {

inline i64 checked_mul(i64 x, i64 y) {
  i64 r;
  if (__builtin_mul_overflow(x, y, &r)) throw OverflowError("64-bit overflow in matrix product");
  return r;
}
inline i64 checked_add(i64 x, i64 y) {
  i64 r;
  if (__builtin_add_overflow(x, y, &r)) throw OverflowError("64-bit overflow in matrix sum");
  return r;
}

}  // namespace detail

/// Point z = x + iy of the upper half-plane.
struct HPoint {
  double x = 0.0;
  double y = 1.0;

  HPoint() = default;
  HPoint(double x_, double y_) : x(x_), y(y_) {
    if (!(y_ > 0.0)) throw DomainError("HPoint requires y > 0");
  }
  explicit HPoint(cplx z) : HPoint(z.real(), z.imag()) {}

  cplx z() const { return {x, y}; }
  friend bool operator==(const HPoint&, const HPoint&) = default;
};

/// Exact determinant-1 integer matrix, stored in canonical projective sign
/// (c > 0, or c == 0 and a > 0).
class GroupElement {
 public:
  i64 a = 1, b = 0, c = 0, d = 1;

  GroupElement() = default;

  /// Builds and canonicalizes the sign; throws DomainError if ad - bc != 1.
  GroupElement(i64 a_, i64 b_, i64 c_, i64 d_) : a(a_), b(b_), c(c_), d(d_) {
    if (static_cast<i128>(a) * d - static_cast<i128>(b) * c != 1)
      throw DomainError("GroupElement requires ad - bc = 1");
    canonicalize_sign();
  }

  static GroupElement identity() { return {}; }

  i64 trace() const { return a + d; }

  GroupElement inverse() const { return GroupElement(d, -b, -c, a); }

  friend GroupElement operator*(const GroupElement& x, const GroupElement& y) {
    using detail::checked_add;
    using detail::checked_mul;
    return GroupElement(checked_add(checked_mul(x.a, y.a), checked_mul(x.b, y.c)),
                        checked_add(checked_mul(x.a, y.b), checked_mul(x.b, y.d)),
                        checked_add(checked_mul(x.c, y.a), checked_mul(x.d, y.c)),
                        checked_add(checked_mul(x.c, y.b), checked_mul(x.d, y.d)));
  }

  /// Integer power; negative exponents use the inverse.
  GroupElement pow(i64 k) const {
    GroupElement base = k < 0 ? inverse() : *this;
    GroupElement acc;
    for (i64 n = k < 0 ? -k : k; n > 0; n >>= 1) {
      if (n & 1) acc = acc * base;
      if (n > 1) base = base * base;
    }
    return acc;
  }

  std::array<i64, 4> entries() const { return {a, b, c, d}; }

  friend bool operator==(const GroupElement&, const GroupElement&) = default;
  friend auto operator<=>(const GroupElement& x, const GroupElement& y) {
    return std::tie(x.a, x.b, x.c, x.d) <=> std::tie(y.a, y.b, y.c, y.d);
  }

  std::string str() const {
    return "(" + std::to_string(a) + " " + std::to_string(b) + "; " + std::to_string(c) + " " +
           std::to_string(d) + ")";
  }

 private:
  void canonicalize_sign() {
    if (c < 0 || (c == 0 && a < 0)) {
      a = -a;
      b = -b;
      c = -c;
      d = -d;
    }
  }
};

inline std::ostream& operator<<(std::ostream& os, const GroupElement& m) { return os << m.str(); }

struct RealMatrix {
  double a = 1, b = 0, c = 0, d = 1;

  static RealMatrix from(const GroupElement& m) {
    return {static_cast<double>(m.a), static_cast<double>(m.b), static_cast<double>(m.c),
            static_cast<double>(m.d)};
  }
  static RealMatrix diag(double p, double q) { return {p, 0, 0, q}; }

  double det() const { return a * d - b * c; }
  double trace() const { return a + d; }
  RealMatrix inverse() const { return {d, -b, -c, a}; }  // determinant 1

  friend RealMatrix operator*(const RealMatrix& x, const RealMatrix& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
            x.c * y.b + x.d * y.d};
  }
  RealMatrix operator-() const { return {-a, -b, -c, -d}; }
};

inline constexpr double kDetDrift = 1e-10;

// ---------------------------------------------------------------------------
// Action, weight and norm.

inline HPoint act(const RealMatrix& m, const HPoint& z) {
  cplx w = (m.a * z.z() + m.b) / (m.c * z.z() + m.d);
  // Im(w) = y / |cz+d|^2 exactly; avoids a rounded-away imaginary part.
  double cx = m.c * z.x + m.d, cy = m.c * z.y;
  return HPoint(w.real(), z.y / (cx * cx + cy * cy));
}
inline HPoint act(const GroupElement& m, const HPoint& z) { return act(RealMatrix::from(m), z); }

/// |az+b| |cz+d|.
inline double norm_at(const RealMatrix& m, const HPoint& z) {
  return std::abs(m.a * z.z() + m.b) * std::abs(m.c * z.z() + m.d);
}
inline double norm_at(const GroupElement& m, const HPoint& z) {
  return norm_at(RealMatrix::from(m), z);
}

/// Im(mz)/|mz|, computed as y / (|az+b||cz+d|).
inline double weight(const RealMatrix& m, const HPoint& z) { return z.y / norm_at(m, z); }
inline double weight(const GroupElement& m, const HPoint& z) {
  return weight(RealMatrix::from(m), z);
}

/// Same quantity evaluated through the image point directly.
inline double weight_direct(const RealMatrix& m, const HPoint& z) {
  HPoint w = act(m, z);
  return w.y / std::hypot(w.x, w.y);
}

/// (a^2+b^2)(c^2+d^2) in exact arithmetic; the square of norm_at(m, i).
inline i128 norm_sq_at_i(const GroupElement& m) {
  i128 top = static_cast<i128>(m.a) * m.a + static_cast<i128>(m.b) * m.b;
  i128 bot = static_cast<i128>(m.c) * m.c + static_cast<i128>(m.d) * m.d;
  return top * bot;
}

// ---------------------------------------------------------------------------
// Hyperbolic elements.

/// Everything the coset machinery needs about gamma1: the multiplier mu > 1,
/// real fixed points p_minus < p_plus and a diagonalizer g with
/// g gamma1 g^-1 = +-diag(sqrt(mu), 1/sqrt(mu)), g(p_plus) = oo, g(p_minus) = 0.
///
/// g = (lam, -lam p_minus; nu, -nu p_plus) with lam > 0 > nu; the scale is fixed
/// by balancing the column norms of g.
struct HyperbolicContext {
  GroupElement gamma1;
  i64 trace = 0;
  double mu = 1.0;
  double log_mu = 0.0;
  RealMatrix g;
  RealMatrix g_inv;
  double p_minus = 0.0, p_plus = 0.0;

  // Extended-precision copies used for conjugation.
  long double lam = 1, nu = -1, pm = 0, pp = 0;

  /// g * m * g^-1, evaluated in extended precision.
  RealMatrix conjugate(const GroupElement& m) const {
    const long double a = m.a, b = m.b, c = m.c, d = m.d;
    const long double x1 = lam * (a - pm * c), x2 = lam * (b - pm * d);
    const long double y1 = nu * (a - pp * c), y2 = nu * (b - pp * d);
    return {static_cast<double>(-nu * (pp * x1 + x2)), static_cast<double>(lam * (pm * x1 + x2)),
            static_cast<double>(-nu * (pp * y1 + y2)), static_cast<double>(lam * (pm * y1 + y2))};
  }
};

namespace detail {

/// Fixed points of x -> (ax+b)/(cx+d) for a hyperbolic real matrix with c != 0,
/// returned in increasing order.
inline std::pair<long double, long double> fixed_points(long double a, long double b,
                                                        long double c, long double d) {
  const long double disc = (a + d) * (a + d) - 4.0L * (a * d - b * c);
  const long double s = std::sqrt(disc);
  // c x^2 + (d - a) x - b = 0; pick the non-cancelling root first.
  const long double q = -0.5L * ((d - a) + (d - a >= 0 ? s : -s));
  long double r1 = q / c, r2 = -b / q;
  if (q == 0) r2 = r1;
  if (r1 > r2) std::swap(r1, r2);
  return {r1, r2};
}

}  // namespace detail

/// Builds the context for a hyperbolic element; replaces gamma1 by its inverse
/// when needed so that it acts as z -> mu z with mu > 1 in conjugated coordinates.
inline HyperbolicContext analyze_hyperbolic(const GroupElement& g1) {
  const i64 tr = g1.trace();
  if (tr * tr <= 4) throw NotHyperbolic("element " + g1.str() + " has |trace| <= 2");
  if (g1.c == 0)
    throw NotHyperbolic("upper-triangular integer matrices of determinant 1 are not hyperbolic");

  HyperbolicContext ctx;
  auto [pm, pp] = detail::fixed_points(g1.a, g1.b, g1.c, g1.d);
  ctx.pm = pm;
  ctx.pp = pp;
  // lam * |nu| * (pp - pm) = 1 and lam^2 (1 + pm^2) = nu^2 (1 + pp^2).
  const long double prod = 1.0L / (pp - pm);
  const long double ratio = std::sqrt((1.0L + pp * pp) / (1.0L + pm * pm));  // lam / |nu|
  ctx.lam = std::sqrt(prod * ratio);
  ctx.nu = -std::sqrt(prod / ratio);

  GroupElement gamma = g1;
  // Conjugate is +-diag(sqrt(mu)^{+-1}, ...); the expanding entry must come first.
  const RealMatrix conj = ctx.conjugate(gamma);
  if (std::abs(conj.a) < std::abs(conj.d)) gamma = g1.inverse();
  const long double atr = std::abs(static_cast<long double>(tr));
  const long double lambda = (atr + std::sqrt(atr * atr - 4.0L)) / 2.0L;

  ctx.gamma1 = gamma;
  ctx.trace = gamma.trace();
  ctx.mu = static_cast<double>(lambda * lambda);
  ctx.log_mu = static_cast<double>(2.0L * std::log(lambda));
  ctx.p_minus = static_cast<double>(pm);
  ctx.p_plus = static_cast<double>(pp);
  ctx.g = {static_cast<double>(ctx.lam), static_cast<double>(-ctx.lam * pm),
           static_cast<double>(ctx.nu), static_cast<double>(-ctx.nu * pp)};
  ctx.g_inv = {static_cast<double>(-ctx.nu * pp), static_cast<double>(ctx.lam * pm),
               static_cast<double>(-ctx.nu), static_cast<double>(ctx.lam)};
  return ctx;
}

/// Diagonalizer of a real hyperbolic matrix, same normalization as
/// analyze_hyperbolic. Diagonal inputs return a diagonal (scaling) matrix.
inline RealMatrix real_diagonalizer(const RealMatrix& m) {
  if (std::abs(m.trace()) <= 2.0) throw NotHyperbolic("real matrix has |trace| <= 2");
  if (m.c == 0.0 && m.b == 0.0) {
    // Already diagonal: the expanding eigendirection must be the first one.
    return std::abs(m.a) > std::abs(m.d) ? RealMatrix{1, 0, 0, 1} : RealMatrix{0, -1, 1, 0};
  }
  if (m.c == 0.0) {
    // Fixed points b/(d-a) and oo.
    const double p = m.b / (m.d - m.a);
    // Repelling/attracting decided after building; send oo -> oo, p -> 0.
    RealMatrix g{1, -p, 0, 1};
    RealMatrix conj = g * m * g.inverse();
    if (std::abs(conj.a) < std::abs(conj.d)) g = RealMatrix{0, -1, 1, 0} * g;
    return g;
  }
  auto [pm, pp] = detail::fixed_points(m.a, m.b, m.c, m.d);
  const long double prod = 1.0L / (pp - pm);
  const long double ratio = std::sqrt((1.0L + pp * pp) / (1.0L + pm * pm));
  const double lam = static_cast<double>(std::sqrt(prod * ratio));
  const double nu = static_cast<double>(-std::sqrt(prod / ratio));
  RealMatrix g{lam, -lam * static_cast<double>(pm), nu, -nu * static_cast<double>(pp)};
  RealMatrix conj = g * m * g.inverse();
  if (std::abs(conj.a) < std::abs(conj.d)) g = RealMatrix{0, -1, 1, 0} * g;
  return g;
}

/// Hyperbolic area of Gamma_0(N)\H: index in PSL_2(Z) times pi/3.
inline double covolume_gamma0(i64 level) {
  double index = static_cast<double>(level);
  i64 n = level;
  for (i64 p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      index *= 1.0 + 1.0 / static_cast<double>(p);
      while (n % p == 0) n /= p;
    }
  }
  if (n > 1) index *= 1.0 + 1.0 / static_cast<double>(n);
  return index * M_PI / 3.0;
}

}  // namespace modsym
