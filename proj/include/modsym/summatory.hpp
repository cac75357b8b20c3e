#pragma once
/**
 * @brief Smooth cutoffs phi_U, their Mellin transforms R_U, sharp and smoothed
 *        summatory functions, and least-squares fits of the asymptotic laws.
 */

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "json.hpp"

#include "modsym/eisenstein.hpp"
#include "modsym/enumerate.hpp"
#include "modsym/errors.hpp"
#include "modsym/modsym.hpp"
#include "modsym/numeric.hpp"

namespace modsym {

enum class CutoffVariant { standard, lower, upper };

namespace detail {

inline double bump_B(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

/// Knee window [lo, hi] of the chosen variant.
inline std::pair<double, double> knee(double U, CutoffVariant v) {
  switch (v) {
    case CutoffVariant::lower: return {1.0 - 2.0 / U, 1.0};
    case CutoffVariant::upper: return {1.0, 1.0 + 2.0 / U};
    default: return {1.0 - 1.0 / U, 1.0 + 1.0 / U};
  }
}

}  // namespace detail

/// C-infinity step psi(x) = B(x) / (B(x) + B(1 - x)), rising from 0 to 1 on [0, 1].
inline double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double b0 = detail::bump_B(x), b1 = detail::bump_B(1.0 - x);
  return b0 / (b0 + b1);
}

inline void require_U(double U) {
  if (!(U >= 2.0)) throw DomainError("cutoff parameter U must be >= 2");
}

/// Decreasing cutoff: 1 below the knee window, 0 above it.
inline double phi(double U, double t, CutoffVariant v = CutoffVariant::standard) {
  require_U(U);
  const auto [lo, hi] = detail::knee(U, v);
  return smooth_step((hi - t) / (hi - lo));
}

/// The sandwich pair: lower cutoff vanishing from t = 1, upper equal to 1 through t = 1.
inline std::pair<double, double> phi_variants(double U, double t) {
  return {phi(U, t, CutoffVariant::lower), phi(U, t, CutoffVariant::upper)};
}

/// R_U(s) = int_0^oo phi_U(t) t^{s-1} dt.
inline cplx mellin_RU(double U, cplx s, CutoffVariant v = CutoffVariant::standard) {
  require_U(U);
  if (!(s.real() > 0.0)) throw DomainError("mellin_RU needs Re(s) > 0");
  const auto [lo, hi] = detail::knee(U, v);
  const cplx closed = std::pow(cplx(lo, 0.0), s) / s;
  // Split the knee at its midpoint so oscillating integrands stay resolved.
  const double mid = 0.5 * (lo + hi);
  auto f = [&](double t) { return phi(U, t, v) * std::exp((s - 1.0) * std::log(t)); };
  const cplx knee_part = quad::integrate_complex(f, lo, mid, 1e-10, 15) + quad::integrate_complex(f, mid, hi, 1e-10, 15);
  return closed + knee_part;
}

// ---------------------------------------------------------------------------
// Summatory functions.

inline cplx sharp_sum(const std::vector<cplx>& values, const std::vector<double>& norms, double T) {
  CompensatedSum<cplx> acc;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (norms[i] <= T) acc.add(values[i]);
  return acc.value();
}

/// Sum of a_n phi_U(f_n / T); `enumerated_to` certifies the inputs cover the knee.
inline cplx smoothed_sum(const std::vector<cplx>& values, const std::vector<double>& norms, double U, double T,
                         CutoffVariant v, double enumerated_to) {
  require_U(U);
  const double reach = T * detail::knee(U, v).second;
  if (reach > enumerated_to * (1.0 + 1e-12))
    throw IncompleteEnumeration("smoothed sum needs the enumeration complete to T (1 + 2/U)");
  CompensatedSum<cplx> acc;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double w = phi(U, norms[i] / T, v);
    if (w != 0.0) acc.add(w * values[i]);
  }
  return acc.value();
}

// ---------------------------------------------------------------------------
// Fits.

enum class FitModel { linear_T, T_logpow };

struct FitReport {
  FitModel model = FitModel::linear_T;
  double leading_coeff = 0.0;
  double paper_coeff = 0.0;
  double rel_dev = 0.0;
  std::vector<double> T_grid;
  std::vector<double> residuals;
  int m = 0, n = 0;
  double U = 0.0;
  std::vector<double> values;  // the fitted sums, kept for diagnostics
};

inline std::string to_string(FitModel m) { return m == FitModel::linear_T ? "linear_T" : "T_logpow"; }

inline nlohmann::ordered_json to_json(const FitReport& r) {
  nlohmann::ordered_json j;
  j["model"] = to_string(r.model);
  j["leading_coeff"] = r.leading_coeff;
  j["paper_coeff"] = r.paper_coeff;
  j["rel_dev"] = r.rel_dev;
  j["T_grid"] = r.T_grid;
  j["residuals"] = r.residuals;
  j["meta"] = {{"m", r.m}, {"n", r.n}, {"U", r.U}};
  return j;
}

namespace detail {

inline void check_grid(const std::vector<double>& grid, const EnumerationResult& e) {
  if (grid.size() < 4) throw DomainError("T_grid needs at least 4 points");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw DomainError("T_grid must be strictly increasing");
  if (grid.back() > e.T) throw IncompleteEnumeration("T_grid exceeds the enumeration bound");
}

/// Least squares of S against beta * basis, no intercept.
inline double fit_through_origin(const std::vector<double>& basis, const std::vector<double>& S) {
  CompensatedSum<double> num, den;
  for (std::size_t i = 0; i < S.size(); ++i) {
    num.add(basis[i] * S[i]);
    den.add(basis[i] * basis[i]);
  }
  return num.value() / den.value();
}

inline double double_factorial_ratio(int n) {
  // n! / ((n/2)! 2^{n/2}) for even n.
  double r = 1.0;
  for (int k = n - 1; k > 0; k -= 2) r *= k;
  return r;
}

}  // namespace detail

/// Counting constant 2 log mu / (y vol).
inline double counting_constant(const HyperbolicContext& ctx, double y, double vol) {
  return 2.0 * ctx.log_mu / (y * vol);
}

/// N(T) = beta T fitted over the grid.
inline FitReport fit_counting(const EnumerationResult& e, const std::vector<double>& grid, double vol) {
  detail::check_grid(grid, e);
  FitReport r;
  r.model = FitModel::linear_T;
  r.T_grid = grid;
  for (double T : grid) r.values.push_back(static_cast<double>(e.count_upto(T)));
  r.leading_coeff = detail::fit_through_origin(grid, r.values);
  r.paper_coeff = counting_constant(e.context, e.z_ref.y, vol);
  r.rel_dev = std::abs(r.leading_coeff - r.paper_coeff) / std::abs(r.paper_coeff);
  for (std::size_t i = 0; i < grid.size(); ++i) r.residuals.push_back(r.values[i] - r.leading_coeff * grid[i]);
  return r;
}

/// Same fit for synthetic counts.
inline FitReport fit_linear(const std::vector<double>& grid, const std::vector<double>& counts, double paper) {
  FitReport r;
  r.model = FitModel::linear_T;
  r.T_grid = grid;
  r.values = counts;
  r.leading_coeff = detail::fit_through_origin(grid, counts);
  r.paper_coeff = paper;
  r.rel_dev = std::abs(r.leading_coeff - paper) / std::abs(paper);
  for (std::size_t i = 0; i < grid.size(); ++i) r.residuals.push_back(counts[i] - r.leading_coeff * grid[i]);
  return r;
}

/// (-8 pi^2)^{m+n} ||f||^{2m+2n} 2 log mu / (y vol^{m+n+1}) (2m)!/(m! 2^m) (2n)!/(n! 2^n).
inline double moment_constant(int m, int n, double pnorm_sq, const HyperbolicContext& ctx, double y, double vol) {
  const int k = m + n;
  return std::pow(-8.0 * std::numbers::pi * std::numbers::pi * pnorm_sq, k) * 2.0 * ctx.log_mu /
         (y * std::pow(vol, k + 1)) * detail::double_factorial_ratio(2 * m) * detail::double_factorial_ratio(2 * n);
}

/// <gamma,alpha>^p <gamma,beta>^q summed over norm <= T.
inline cplx raw_moment_sum(int p, int q, const EnumerationResult& e, const SymbolTable& symbols, double T) {
  CompensatedSum<cplx> acc;
  for (const auto& r : e.reps) {
    if (r.norm > T) break;
    const auto [al, be] = twisted_symbols(symbols.at(r.rep).value);
    acc.add(std::pow(al, p) * std::pow(be, q));
  }
  return acc.value();
}

/// Fits sum <gamma,alpha>^{2m} <gamma,beta>^{2n} against beta T (log T)^{m+n}.
inline FitReport moment_sum(int m, int n, const EnumerationResult& e, const SymbolTable& symbols,
                            const std::vector<double>& grid, double pnorm_sq, double vol) {
  if (m < 0 || n < 0 || m + n > 4) throw DomainError("moment_sum needs m, n >= 0 and m + n <= 4");
  detail::check_grid(grid, e);
  FitReport r;
  r.model = m + n == 0 ? FitModel::linear_T : FitModel::T_logpow;
  r.m = m;
  r.n = n;
  r.T_grid = grid;
  std::vector<double> basis;
  for (double T : grid) {
    basis.push_back(T * std::pow(std::log(T), m + n));
    r.values.push_back(raw_moment_sum(2 * m, 2 * n, e, symbols, T).real());
  }
  r.leading_coeff = detail::fit_through_origin(basis, r.values);
  r.paper_coeff = moment_constant(m, n, pnorm_sq, e.context, e.z_ref.y, vol);
  r.rel_dev = std::abs(r.leading_coeff - r.paper_coeff) / std::abs(r.paper_coeff);
  for (std::size_t i = 0; i < grid.size(); ++i) r.residuals.push_back(r.values[i] - r.leading_coeff * basis[i]);
  return r;
}

/// |sum <gamma,alpha>^p <gamma,beta>^q| / (T (log T)^{(p+q)/2}) across the grid.
inline std::vector<double> odd_moment_decay(int p, int q, const EnumerationResult& e, const SymbolTable& symbols,
                                            const std::vector<double>& grid) {
  std::vector<double> out;
  for (double T : grid)
    out.push_back(std::abs(raw_moment_sum(p, q, e, symbols, T)) / (T * std::pow(std::log(T), 0.5 * (p + q))));
  return out;
}

/// (2m)! / 2^m: ordered pairings of 2m slots with each pair increasing.
inline double pairing_count(int m) {
  double r = 1.0;
  for (int k = 1; k <= 2 * m; ++k) r *= k;
  return r / std::pow(2.0, m);
}

}  // namespace modsym
