#pragma once
/**
 * @brief Plain and twisted hyperbolic Eisenstein series as truncated coset
 *        sums in the half-plane of absolute convergence, with numerical checks
 *        of their differential and residue identities.
 */

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "modsym/enumerate.hpp"
#include "modsym/errors.hpp"
#include "modsym/halfplane.hpp"
#include "modsym/modsym.hpp"
#include "modsym/numeric.hpp"

namespace modsym {

struct EisensteinValue {
  HPoint z{0.0, 1.0};
  cplx s;
  cplx value;
  double truncation_T = 0.0;
  double tail_estimate = 0.0;  // heuristic, from the empirical counting density
  std::size_t terms = 0;
};

struct TwistOrder {
  int m = 0;  // power of <gamma, alpha>, alpha = Re(f dz)
  int n = 0;  // power of <gamma, beta>, beta = Im(f dz)
};

inline constexpr int kMaxTwist = 8;

namespace detail {

inline void require_convergent(cplx s) {
  if (!(s.real() > 1.0)) throw DomainError("Eisenstein series need Re(s) > 1");
}

/// (weight)^s for a positive real weight.
inline cplx weight_pow(double w, cplx s) { return std::exp(s * std::log(w)); }

/// rho y^sigma T^{1-sigma} / (sigma - 1) with rho the empirical density count/T.
inline double heuristic_tail(const EnumerationResult& e, double T, double y, double sigma) {
  const double rho = static_cast<double>(e.count_upto(T)) / T;
  return rho * std::pow(y, sigma) * std::pow(T, 1.0 - sigma) / (sigma - 1.0);
}

inline double truncation_of(const EnumerationResult& e, double T) {
  if (T <= 0) return e.T;
  if (T > e.T) throw IncompleteEnumeration("truncation T exceeds the enumeration bound");
  return T;
}

}  // namespace detail

/// <gamma, alpha> and <gamma, beta>: -2 pi i times the real and imaginary parts of int f dz.
inline std::pair<cplx, cplx> twisted_symbols(cplx sym) {
  const cplx integral = symbol_integral(sym);
  const cplx m2pii(0.0, -2.0 * std::numbers::pi);
  return {m2pii * integral.real(), m2pii * integral.imag()};
}

/// Sum of (Im(gamma z)/|gamma z|)^s over cosets with norm <= T (T <= 0: all).
inline EisensteinValue eval_plain(const HPoint& z, cplx s, const EnumerationResult& e, double T = 0.0) {
  detail::require_convergent(s);
  const double Tt = detail::truncation_of(e, T);
  CompensatedSum<cplx> acc;
  std::size_t k = 0;
  for (const auto& r : e.reps) {
    if (r.norm > Tt) break;
    acc.add(detail::weight_pow(weight(r.conj, z), s));
    ++k;
  }
  return {z, s, acc.value(), Tt, detail::heuristic_tail(e, Tt, z.y, s.real()), k};
}

/// Sum of <gamma,alpha>^m <gamma,beta>^n (Im(gamma z)/|gamma z|)^s.
inline EisensteinValue eval_twisted(const HPoint& z, cplx s, TwistOrder order, const EnumerationResult& e,
                                    const SymbolTable& symbols, double T = 0.0) {
  detail::require_convergent(s);
  if (order.m < 0 || order.n < 0 || order.m + order.n > kMaxTwist)
    throw DomainError("twist order must satisfy m, n >= 0 and m + n <= 8");
  const double Tt = detail::truncation_of(e, T);
  CompensatedSum<cplx> acc;
  std::size_t k = 0;
  for (const auto& r : e.reps) {
    if (r.norm > Tt) break;
    const auto [al, be] = twisted_symbols(symbols.at(r.rep).value);
    acc.add(std::pow(al, order.m) * std::pow(be, order.n) * detail::weight_pow(weight(r.conj, z), s));
    ++k;
  }
  const double scale = std::pow(2.0 * std::numbers::pi, order.m + order.n);
  return {z, s, acc.value(), Tt, detail::heuristic_tail(e, Tt, z.y, s.real()) * scale, k};
}

/// Sum of exp(eps_a <gamma,alpha> + eps_b <gamma,beta>) (Im(gamma z)/|gamma z|)^s.
inline EisensteinValue eval_eps(const HPoint& z, cplx s, double eps_a, double eps_b, const EnumerationResult& e,
                                const SymbolTable& symbols, double T = 0.0) {
  detail::require_convergent(s);
  const double Tt = detail::truncation_of(e, T);
  CompensatedSum<cplx> acc;
  std::size_t k = 0;
  for (const auto& r : e.reps) {
    if (r.norm > Tt) break;
    const auto [al, be] = twisted_symbols(symbols.at(r.rep).value);
    acc.add(std::exp(eps_a * al + eps_b * be) * detail::weight_pow(weight(r.conj, z), s));
    ++k;
  }
  return {z, s, acc.value(), Tt, detail::heuristic_tail(e, Tt, z.y, s.real()), k};
}

enum class Axis { alpha = 0, beta = 1 };

struct EpsConsistency {
  cplx difference_quotient;
  cplx twisted;
  double abs_diff = 0.0;
  double rel_diff = 0.0;
};

/// Central eps-difference of the deformed series against the first twisted series.
inline EpsConsistency eps_consistency(const HPoint& z, cplx s, Axis k, double eps, const EnumerationResult& e,
                                      const SymbolTable& symbols, double T = 0.0) {
  if (!(std::abs(eps) > 0.0) || std::abs(eps) > 1e-3) throw DomainError("eps must satisfy 0 < |eps| <= 1e-3");
  const double ea = k == Axis::alpha ? eps : 0.0, eb = k == Axis::beta ? eps : 0.0;
  const cplx plus = eval_eps(z, s, ea, eb, e, symbols, T).value;
  const cplx minus = eval_eps(z, s, -ea, -eb, e, symbols, T).value;
  EpsConsistency out;
  out.difference_quotient = (plus - minus) / (2.0 * eps);
  out.twisted =
      eval_twisted(z, s, k == Axis::alpha ? TwistOrder{1, 0} : TwistOrder{0, 1}, e, symbols, T).value;
  out.abs_diff = std::abs(out.difference_quotient - out.twisted);
  out.rel_diff = out.abs_diff / std::abs(out.twisted);
  return out;
}

struct PdeResidual {
  double residual = 0.0;  // relative
  double absolute = 0.0;
};

/// |y^2 Lap F + s(1-s) F + s^2 G| / |s^2 G| with a five-point Laplacian,
/// where F = E(., s) and G = E(., s + 2) are supplied as callables.
template <class F, class G>
PdeResidual pde_residual(const HPoint& z, cplx s, double h, F&& fs, G&& fs2) {
  detail::require_convergent(s);
  if (!(h > 0.0) || h >= z.y) throw DomainError("finite-difference step must satisfy 0 < h < y");
  const cplx c = fs(z);
  const cplx lap = (fs(HPoint(z.x + h, z.y)) + fs(HPoint(z.x - h, z.y)) + fs(HPoint(z.x, z.y + h)) +
                    fs(HPoint(z.x, z.y - h)) - 4.0 * c) /
                   (h * h);
  const cplx rhs = s * s * fs2(z);
  const cplx res = z.y * z.y * lap + s * (1.0 - s) * c + rhs;
  return {std::abs(res) / std::abs(rhs), std::abs(res)};
}

/// Single-term identity for (y/|z|)^s.
inline PdeResidual check_pde_single(const HPoint& z, cplx s, double h) {
  auto term = [](cplx ss) {
    return [ss](const HPoint& w) { return detail::weight_pow(w.y / std::abs(w.z()), ss); };
  };
  return pde_residual(z, s, h, term(s), term(s + 2.0));
}

/// Full truncated sum; the truncation is the same coset set for every stencil point.
inline PdeResidual check_pde(const HPoint& z, cplx s, double h, const EnumerationResult& e, double T = 0.0) {
  auto series = [&](cplx ss) {
    return [&, ss](const HPoint& w) { return eval_plain(w, ss, e, T).value; };
  };
  return pde_residual(z, s, h, series(s), series(s + 2.0));
}

/// Integral of (y/|z|)^3 d mu over 1 <= |z| <= mu, in polar coordinates.
inline double annulus_integral(double mu) {
  if (!(mu > 1.0)) throw DomainError("annulus_integral needs mu > 1");
  // Radial panels [2^k, 2^{k+1}).
  auto radial = [&](double theta) {
    CompensatedSum<double> acc;
    for (double lo = 1.0; lo < mu; lo *= 2.0) {
      const double hi = std::min(mu, 2.0 * lo);
      acc.add(quad::integrate([&](double r) { return std::sin(theta) / r; }, lo, hi, 1e-14, 20));
    }
    return acc.value();
  };
  return quad::integrate(radial, 0.0, std::numbers::pi, 1e-14, 20);
}

/// Real 1-form p dx + q dy and its pointwise hyperbolic inner product.
struct OneForm {
  double p = 0.0, q = 0.0;
};

inline double pairing(const OneForm& u, const OneForm& v, double y) { return y * y * (u.p * v.p + u.q * v.q); }

/// Re(f dz) and Im(f dz) for a value f at a point.
inline std::pair<OneForm, OneForm> real_imag_forms(cplx f) {
  return {{f.real(), -f.imag()}, {f.imag(), f.real()}};
}

/// (sigma - 1) E(i, sigma) at the given sigmas, for the residue trend.
inline std::vector<double> residue_trend(const EnumerationResult& e, const std::vector<double>& sigmas) {
  std::vector<double> out;
  for (double s : sigmas) out.push_back((s - 1.0) * eval_plain(HPoint(0.0, 1.0), s, e).value.real());
  return out;
}

}  // namespace modsym
