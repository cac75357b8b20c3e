#pragma once
// Small numerical kernels shared by the modules: compensated summation,
// adaptive quadrature wrappers, deterministic sharded loops.

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace modsym {

/// Neumaier compensated accumulator. Works for double and std::complex<double>.
template <class T>
class CompensatedSum {
 public:
  void add(const T& v) {
    if constexpr (std::is_same_v<T, double>) {
      add_real(sum_, comp_, v);
    } else {
      double sr = sum_.real(), cr = comp_.real(), si = sum_.imag(), ci = comp_.imag();
      add_real(sr, cr, v.real());
      add_real(si, ci, v.imag());
      sum_ = {sr, si};
      comp_ = {cr, ci};
    }
  }
  CompensatedSum& operator+=(const T& v) {
    add(v);
    return *this;
  }
  T value() const { return sum_ + comp_; }

 private:
  static void add_real(double& s, double& c, double v) {
    const double t = s + v;
    if (std::abs(s) >= std::abs(v))
      c += (s - t) + v;
    else
      c += (v - t) + s;
    s = t;
  }
  T sum_{};
  T comp_{};
};

template <class Range>
auto compensated_total(const Range& r) {
  using T = std::decay_t<decltype(*std::begin(r))>;
  CompensatedSum<T> acc;
  for (const auto& v : r) acc.add(v);
  return acc.value();
}

/// Runs body(i) for i in [0, n) over a fixed number of contiguous shards.
/// Results must be written to per-index slots; callers reduce sequentially,
/// so output never depends on the thread count.
inline void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      // Strided assignment balances shards whose cost grows with the index.
      for (std::size_t i = t; i < n; i += threads) body(i);
    });
  }
}

inline unsigned default_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

namespace quad {

/// Adaptive Gauss-Kronrod (15-point) on [a, b]; relative tolerance `tol`.
template <class F>
auto integrate(F&& f, double a, double b, double tol = 1e-12, unsigned max_depth = 15,
               double* error = nullptr) {
  double err = 0.0;
  auto v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(std::forward<F>(f), a, b,
                                                                          max_depth, tol, &err);
  if (error) *error = err;
  return v;
}

/// Complex-valued integrand, integrated component-wise.
template <class F>
std::complex<double> integrate_complex(F&& f, double a, double b, double tol = 1e-12,
                                       unsigned max_depth = 15) {
  const double re = integrate([&](double t) { return f(t).real(); }, a, b, tol, max_depth);
  const double im = integrate([&](double t) { return f(t).imag(); }, a, b, tol, max_depth);
  return {re, im};
}

}  // namespace quad

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace modsym
