#pragma once
/**
 * @brief Independent reference computations used by the test suite and the
 *        acceptance run. None of these reuse the production search logic.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "modsym/cuspform.hpp"
#include "modsym/enumerate.hpp"
#include "modsym/halfplane.hpp"
#include "modsym/modsym.hpp"
#include "modsym/numeric.hpp"

namespace modsym::oracle {

/// Conjugation by plain double matrix products, g m g^-1.
inline RealMatrix conjugate_plain(const HyperbolicContext& ctx, const GroupElement& m) {
  return ctx.g * RealMatrix::from(m) * ctx.g_inv;
}

/// Brute-force window choice: scans k in [-K, K] for the power of gamma1 that
/// puts |conj(gamma1^k m)(i)| in [1, mu), using the scaling |w| -> mu^k |w|.
/// Returns the integer representative, or nullopt if no k qualifies.
inline std::optional<GroupElement> brute_canonical(const HyperbolicContext& ctx, const GroupElement& m,
                                                   int K = 50) {
  const RealMatrix c = conjugate_plain(ctx, m);
  const HPoint i(0.0, 1.0);
  const double log_r0 = std::log(std::abs(act(c, i).z()));
  std::optional<int> chosen;
  double best_gap = -1.0;
  for (int k = -K; k <= K; ++k) {
    // diag(s, 1/s) multiplies |w| by s^2 = mu^k.
    const double r = std::exp(log_r0 + k * ctx.log_mu);
    const double lo = r - 1.0, hi = ctx.mu - r;
    if (lo >= -kWindowBand * ctx.mu && hi > -kWindowBand * ctx.mu) {
      const double gap = std::min(lo, hi);
      if (!chosen || gap > best_gap) {
        chosen = k;
        best_gap = gap;
      }
    }
  }
  if (!chosen) return std::nullopt;
  const GroupElement rep = ctx.gamma1.pow(*chosen) * m;
  // Near the window boundary both neighbours are candidates; keep the smaller entries.
  if (best_gap < 1e-9 * ctx.mu) {
    const GroupElement alt1 = ctx.gamma1 * rep, alt2 = ctx.gamma1.inverse() * rep;
    GroupElement best = rep;
    auto key = [](const GroupElement& g) {
      return std::array<i64, 4>{std::abs(g.a), std::abs(g.b), std::abs(g.c), std::abs(g.d)};
    };
    for (const auto& alt : {alt1, alt2}) {
      const double r = std::abs(act(conjugate_plain(ctx, alt), i).z());
      if (r >= 1.0 - kWindowBand * ctx.mu && r < ctx.mu * (1.0 + kWindowBand) && key(alt) < key(best)) best = alt;
    }
    return best;
  }
  return rep;
}

/// Entry bound B such that every coset of norm <= T (at i) has a member with all
/// integer entries <= B: the balanced member has a'^2+b'^2+c'^2+d'^2 <= T (sqrt(mu)+1).
inline i64 coset_box_bound(const HyperbolicContext& ctx, double T) {
  auto frob = [](const RealMatrix& m) { return std::sqrt(m.a * m.a + m.b * m.b + m.c * m.c + m.d * m.d); };
  const double conj_bound = std::sqrt(T * (std::sqrt(ctx.mu) + 1.0));
  return static_cast<i64>(std::ceil(frob(ctx.g) * frob(ctx.g_inv) * conj_bound * 1.01)) + 1;
}

/// Every element of Gamma_0(N) with max |entry| <= B whose norm at i is <= T,
/// brute-force canonicalized and deduplicated.
inline std::set<GroupElement> box_cosets(i64 level, const HyperbolicContext& ctx, double T, i64 B) {
  std::set<GroupElement> out;
  const HPoint i(0.0, 1.0);
  auto consider = [&](const GroupElement& m) {
    const RealMatrix c = conjugate_plain(ctx, m);
    if (norm_at(c, i) > T * (1.0 + 1e-9)) return;
    if (auto rep = brute_canonical(ctx, m)) {
      if (norm_at(conjugate_plain(ctx, *rep), i) <= T) out.insert(*rep);
    }
  };
  // c = 0: a = d = 1 canonically.
  for (i64 b = -B; b <= B; ++b) consider(GroupElement(1, b, 0, 1));
  for (i64 c = level; c <= B; c += level) {
    for (i64 d = -B; d <= B; ++d) {
      if (std::gcd(c, d) != 1) continue;
      // a d = 1 mod c.
      i64 x0 = 0, x1 = 1, r0 = c, r1 = ((d % c) + c) % c;
      while (r1 != 0) {
        const i64 qt = r0 / r1;
        std::tie(r0, r1) = std::make_pair(r1, r0 - qt * r1);
        std::tie(x0, x1) = std::make_pair(x1, x0 - qt * x1);
      }
      const i64 inv = ((x0 % c) + c) % c;
      for (i64 a = inv - ((inv + B) / c) * c; a <= B; a += c) {
        if (a < -B) continue;
        const i64 b = (a * d - 1) / c;
        if (b < -B || b > B) continue;
        consider(GroupElement(a, b, c, d));
      }
    }
  }
  return out;
}

/// Literal scan over all (a, c, d) with |entries| <= B, b solved from the determinant.
inline std::set<GroupElement> literal_box_cosets(i64 level, const HyperbolicContext& ctx, double T, i64 B) {
  std::set<GroupElement> out;
  const HPoint i(0.0, 1.0);
  for (i64 a = -B; a <= B; ++a)
    for (i64 c = -B; c <= B; ++c)
      for (i64 d = -B; d <= B; ++d) {
        i64 b;
        if (c == 0) {
          if (a * d != 1) continue;
          for (b = -B; b <= B; ++b) {
            const GroupElement m(a, b, c, d);
            if (auto rep = brute_canonical(ctx, m))
              if (norm_at(conjugate_plain(ctx, *rep), i) <= T) out.insert(*rep);
          }
          continue;
        }
        if (c % level != 0 || (a * d - 1) % c != 0) continue;
        b = (a * d - 1) / c;
        if (std::abs(b) > B) continue;
        const GroupElement m(a, b, c, d);
        if (auto rep = brute_canonical(ctx, m))
          if (norm_at(conjugate_plain(ctx, *rep), i) <= T) out.insert(*rep);
      }
  return out;
}

/// Direct sum of the weight^s over an explicit coset set, weights from the image point.
inline cplx direct_eisenstein(const HyperbolicContext& ctx, const std::set<GroupElement>& reps, const HPoint& z,
                              cplx s) {
  CompensatedSum<cplx> acc;
  for (const auto& m : reps) acc.add(std::exp(s * std::log(weight_direct(ctx.conjugate(m), z))));
  return acc.value();
}

/// f(z) by a fixed-length sum in 50-digit arithmetic.
inline cplx eval_f_reference(const QExpansion& q, const HPoint& z, i64 terms) {
  using F = boost::multiprecision::cpp_bin_float_50;
  const F two_pi = 2 * boost::math::constants::pi<F>();
  const F x = z.x, y = z.y;
  F re = 0, im = 0;
  for (i64 n = 1; n <= terms; ++n) {
    const F mag = exp(-two_pi * n * y) * q.a(n);
    const F ph = two_pi * n * x;
    re += mag * cos(ph);
    im += mag * sin(ph);
  }
  return {static_cast<double>(re), static_cast<double>(im)};
}

namespace detail {

/// Adaptive bisection with an absolute error budget proportional to panel length.
template <class F>
cplx adaptive_complex(const F& f, double a, double b, double abs_tol_per_unit, int depth) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  double er = 0.0, ei = 0.0;
  const double re = GK::integrate([&](double t) { return f(t).real(); }, a, b, 0, 0.0, &er);
  const double im = GK::integrate([&](double t) { return f(t).imag(); }, a, b, 0, 0.0, &ei);
  if (er + ei <= abs_tol_per_unit * (b - a) || depth == 0) return {re, im};
  const double m = 0.5 * (a + b);
  return adaptive_complex(f, a, m, abs_tol_per_unit, depth - 1) + adaptive_complex(f, m, b, abs_tol_per_unit, depth - 1);
}

}  // namespace detail

/// -2 pi i times the integral of f along the segment z0 -> z1 by adaptive quadrature
/// with absolute error about `tol`.
inline cplx path_symbol(const QExpansion& q, const HPoint& z0, const HPoint& z1, double tol = 1e-9) {
  const cplx dz = z1.z() - z0.z();
  auto f = [&](double t) {
    const cplx w = z0.z() + t * dz;
    return eval_f(q, HPoint(w), 1e-13).value;
  };
  const double per_unit = tol / (2.0 * std::numbers::pi * std::abs(dz));
  return cplx(0.0, -2.0 * std::numbers::pi) * dz * detail::adaptive_complex(f, 0.0, 1.0, per_unit, 40);
}

/// Permutations sigma of {1..2m} with sigma(2j-1) < sigma(2j) for all j.
inline long long count_increasing_pairings(int m) {
  std::vector<int> p(static_cast<std::size_t>(2 * m));
  std::iota(p.begin(), p.end(), 1);
  long long count = 0;
  do {
    bool ok = true;
    for (int j = 0; j < m && ok; ++j) ok = p[static_cast<std::size_t>(2 * j)] < p[static_cast<std::size_t>(2 * j + 1)];
    if (ok) ++count;
  } while (std::next_permutation(p.begin(), p.end()));
  return count;
}

/// Independent standard normal pairs from a fixed-seed generator.
inline std::vector<std::pair<double, double>> gaussian_pairs(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<std::pair<double, double>> out(n);
  for (auto& p : out) {
    p.first = nd(gen);
    p.second = nd(gen);
  }
  return out;
}

/// Hand-expanded q prod (1-q^n)^2 (1-q^{11n})^2 through q^M by dense multiplication.
inline std::vector<i64> eta11_dense(i64 M) {
  std::vector<i64> p(static_cast<std::size_t>(M), 0);
  p[0] = 1;
  auto times = [&](i64 step) {
    for (i64 k = step; k < M; k += step)
      for (i64 j = M - 1; j >= k; --j) p[static_cast<std::size_t>(j)] -= p[static_cast<std::size_t>(j - k)];
  };
  times(1);
  times(1);
  times(11);
  times(11);
  return p;  // coefficient of q^{n} in the product sits at index n - 1 of the form
}

}  // namespace modsym::oracle
