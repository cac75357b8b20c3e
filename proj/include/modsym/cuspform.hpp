#pragma once
/**
 * @brief Weight-2 cusp form q-expansions: generation for level 11, file I/O,
 *        evaluation with a certified truncation bound.
 */

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "modsym/errors.hpp"
#include "modsym/halfplane.hpp"
#include "modsym/io.hpp"
#include "modsym/numeric.hpp"

namespace modsym {

/// Coefficients a_1..a_M of a normalized weight-2 newform, |a_n| <= 2n certified.
class QExpansion {
 public:
  QExpansion() = default;
  QExpansion(i64 level, std::vector<i64> coeffs, bool allow_bound_violation = false)
      : level_(level), coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw FormatError("empty q-expansion");
    if (coeffs_[0] != 1) throw FormatError("a_1 must be 1 (normalized newform)");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      const i64 n = static_cast<i64>(i) + 1;
      if (std::abs(coeffs_[i]) > 2 * n) {
        if (!allow_bound_violation)
          throw BoundViolation("|a_" + std::to_string(n) + "| = " + std::to_string(std::abs(coeffs_[i])) +
                               " exceeds 2n");
        certified_ = false;
      }
    }
  }

  i64 level() const { return level_; }
  int weight() const { return 2; }
  i64 M() const { return static_cast<i64>(coeffs_.size()); }
  i64 a(i64 n) const { return coeffs_[static_cast<std::size_t>(n - 1)]; }
  const std::vector<i64>& coeffs() const { return coeffs_; }
  /// True when |a_n| <= 2n holds for every stored n.
  bool certified() const { return certified_; }

  bool operator==(const QExpansion& o) const { return level_ == o.level_ && coeffs_ == o.coeffs_; }

 private:
  i64 level_ = 0;
  std::vector<i64> coeffs_;
  bool certified_ = true;
};

namespace detail {

/// Exponents and signs of Euler's product prod(1 - q^n) up to q^limit.
inline void pentagonal_terms(i64 limit, std::vector<i64>& exps, std::vector<int>& signs) {
  exps.clear();
  signs.clear();
  exps.push_back(0);
  signs.push_back(1);
  for (i64 k = 1;; ++k) {
    const i64 e1 = k * (3 * k - 1) / 2;
    const i64 e2 = k * (3 * k + 1) / 2;
    if (e1 > limit) break;
    const int s = (k % 2 == 0) ? 1 : -1;
    exps.push_back(e1);
    signs.push_back(s);
    if (e2 <= limit) {
      exps.push_back(e2);
      signs.push_back(s);
    }
  }
}

/// out = in * prod(1 - q^{step n}), truncated to in.size().
inline std::vector<std::int32_t> times_euler(const std::vector<std::int32_t>& in, i64 step) {
  const i64 L = static_cast<i64>(in.size());
  std::vector<i64> exps;
  std::vector<int> signs;
  pentagonal_terms((L - 1) / step, exps, signs);
  std::vector<std::int32_t> out(in.size(), 0);
  constexpr i64 block = 1 << 14;
  for (i64 b0 = 0; b0 < L; b0 += block) {
    const i64 b1 = std::min(L, b0 + block);
    std::int32_t* o = out.data();
    for (std::size_t k = 0; k < exps.size(); ++k) {
      const i64 sh = exps[k] * step;
      if (sh >= b1) break;
      const i64 lo = std::max(b0, sh);
      const std::int32_t* src = in.data() - sh;
      if (signs[k] > 0) {
        for (i64 n = lo; n < b1; ++n) o[n] += src[n];
      } else {
        for (i64 n = lo; n < b1; ++n) o[n] -= src[n];
      }
    }
  }
  return out;
}

}  // namespace detail

/// q prod(1-q^n)^2 (1-q^{11n})^2 up to q^M.
inline QExpansion eta_expansion_11(i64 M) {
  if (M < 1) throw DomainError("M must be >= 1");
  if (M > 400'000'000) throw OverflowError("M too large for 32-bit intermediate coefficients");
  const i64 L = M;  // coefficients of the eta quotient at q^0..q^{M-1}
  std::vector<i64> exps;
  std::vector<int> signs;
  detail::pentagonal_terms(L - 1, exps, signs);
  std::vector<std::int32_t> sq(static_cast<std::size_t>(L), 0);
  for (std::size_t i = 0; i < exps.size(); ++i) {
    for (std::size_t j = i; j < exps.size(); ++j) {
      const i64 e = exps[i] + exps[j];
      if (e >= L) break;
      sq[static_cast<std::size_t>(e)] += (i == j ? 1 : 2) * signs[i] * signs[j];
    }
  }
  auto once = detail::times_euler(sq, 11);
  auto twice = detail::times_euler(once, 11);
  std::vector<i64> coeffs(twice.begin(), twice.end());
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const i64 n = static_cast<i64>(i) + 1;
    if (std::abs(coeffs[i]) > 2 * n) throw OverflowError("coefficient escaped the 2n bound at n=" + std::to_string(n));
  }
  return QExpansion(11, std::move(coeffs));
}

inline QExpansion truncate(const QExpansion& q, i64 M) {
  if (M > q.M()) throw InsufficientCoefficients(M, q.M());
  return QExpansion(q.level(), std::vector<i64>(q.coeffs().begin(), q.coeffs().begin() + M), !q.certified());
}

inline void save_coeffs(const QExpansion& q, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path.string());
  os << "# qexp N=" << q.level() << " k=2 M=" << q.M() << '\n';
  std::string buf;
  buf.reserve(1 << 20);
  for (i64 n = 1; n <= q.M(); ++n) {
    buf += std::to_string(n);
    buf += ' ';
    buf += std::to_string(q.a(n));
    buf += '\n';
    if (buf.size() > (1 << 20) - 64) {
      os << buf;
      buf.clear();
    }
  }
  os << buf;
}

inline QExpansion load_coeffs(const std::filesystem::path& path, bool allow_bound_violation = false) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open coefficient file " + path.string());
  std::string line;
  if (!std::getline(is, line)) throw FormatError("empty coefficient file");
  const std::string prefix = "# qexp ";
  if (line.rfind(prefix, 0) != 0) throw FormatError("bad coefficient header: " + line);
  i64 level = -1, weight = -1, M = -1;
  for (const auto& tok : detail::split(line.substr(prefix.size()), ' ')) {
    if (tok.empty()) continue;
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw FormatError("bad header token: " + tok);
    const std::string key = tok.substr(0, eq);
    const i64 val = detail::parse_int(tok.substr(eq + 1));
    if (key == "N") level = val;
    else if (key == "k") weight = val;
    else if (key == "M") M = val;
    else throw FormatError("unknown header key: " + key);
  }
  if (level < 1 || M < 1) throw FormatError("header must give N >= 1 and M >= 1");
  if (weight != 2) throw FormatError("only weight 2 is supported");
  std::vector<i64> coeffs;
  coeffs.reserve(static_cast<std::size_t>(M));
  i64 expect = 1;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto sp = line.find(' ');
    if (sp == std::string::npos || line.find(' ', sp + 1) != std::string::npos)
      throw FormatError("expected '<n> <a_n>': " + line);
    const i64 n = detail::parse_int(line.substr(0, sp));
    if (n != expect) throw FormatError("coefficient index out of order at n=" + std::to_string(n));
    coeffs.push_back(detail::parse_int(line.substr(sp + 1)));
    ++expect;
  }
  if (static_cast<i64>(coeffs.size()) != M)
    throw FormatError("header M=" + std::to_string(M) + " but found " + std::to_string(coeffs.size()) + " lines");
  return QExpansion(level, std::move(coeffs), allow_bound_violation);
}

struct FValue {
  cplx value;
  double tail_bound;  // certified bound on the discarded terms
  i64 terms;
};

namespace detail {

/// Bound on sum_{n > M} 2n r^n for 0 < r < 1.
inline double weighted_geometric_tail(i64 M, double r) {
  const double m1 = static_cast<double>(M + 1);
  return 2.0 * std::pow(r, m1) * (m1 - static_cast<double>(M) * r) / ((1.0 - r) * (1.0 - r));
}

/// Bound on sum_{n > M} 2 r^n for 0 < r < 1.
inline double geometric_tail(i64 M, double r) {
  return 2.0 * std::pow(r, static_cast<double>(M + 1)) / (1.0 - r);
}

/// Smallest M with tail(M) <= err, by doubling then bisection.
template <class Tail>
i64 smallest_truncation(Tail tail, double err) {
  i64 hi = 1;
  while (tail(hi) > err) {
    if (hi > (i64{1} << 50)) throw DomainError("truncation bound unreachable");
    hi *= 2;
  }
  i64 lo = 0;
  if (tail(0) <= err) return 0;
  while (hi - lo > 1) {
    const i64 mid = lo + (hi - lo) / 2;
    (tail(mid) <= err ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace detail

/// Number of terms needed so the tail of sum a_n q^n at height y is <= err.
inline i64 required_terms_f(double y, double err) {
  const double r = std::exp(-2.0 * std::numbers::pi * y);
  return detail::smallest_truncation([&](i64 M) { return detail::weighted_geometric_tail(M, r); }, err);
}

/// Number of terms needed so the tail of sum (a_n/n) q^n at height y is <= err.
inline i64 required_terms_antiderivative(double y, double err) {
  const double r = std::exp(-2.0 * std::numbers::pi * y);
  return detail::smallest_truncation([&](i64 M) { return detail::geometric_tail(M, r); }, err);
}

/// f(z) = sum a_n e^{2 pi i n z}, truncated with certified tail.
inline FValue eval_f(const QExpansion& q, const HPoint& z, double target_abs_err) {
  const double r = std::exp(-2.0 * std::numbers::pi * z.y);
  const i64 M = required_terms_f(z.y, target_abs_err);
  if (M > q.M()) throw InsufficientCoefficients(M, q.M());
  const cplx step = std::polar(r, 2.0 * std::numbers::pi * (z.x - std::floor(z.x)));
  CompensatedSum<cplx> acc;
  cplx w = 1.0;
  for (i64 n = 1; n <= M; ++n) {
    if ((n & 63) == 1) {
      w = std::polar(std::pow(r, static_cast<double>(n)),
                     2.0 * std::numbers::pi * std::fmod(static_cast<double>(n) * (z.x - std::floor(z.x)), 1.0));
    } else {
      w *= step;
    }
    acc.add(static_cast<double>(q.a(n)) * w);
  }
  return {acc.value(), detail::weighted_geometric_tail(M, r), M};
}

/// F(z) = sum (a_n / n) e^{2 pi i n z}, so F' = 2 pi i f.
inline FValue eval_antiderivative(const QExpansion& q, const HPoint& z, double target_abs_err) {
  const double r = std::exp(-2.0 * std::numbers::pi * z.y);
  const i64 M = required_terms_antiderivative(z.y, target_abs_err);
  if (M > q.M()) throw InsufficientCoefficients(M, q.M());
  const double frac = z.x - std::floor(z.x);
  const cplx step = std::polar(r, 2.0 * std::numbers::pi * frac);
  CompensatedSum<cplx> acc;
  cplx w = 1.0;
  for (i64 n = 1; n <= M; ++n) {
    if ((n & 63) == 1) {
      w = std::polar(std::pow(r, static_cast<double>(n)),
                     2.0 * std::numbers::pi * std::fmod(static_cast<double>(n) * frac, 1.0));
    } else {
      w *= step;
    }
    acc.add(static_cast<double>(q.a(n)) / static_cast<double>(n) * w);
  }
  return {acc.value(), detail::geometric_tail(M, r), M};
}

}  // namespace modsym
