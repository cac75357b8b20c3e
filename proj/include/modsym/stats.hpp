#pragma once
/**
 * @brief Empirical distribution of normalized modular symbols: moments,
 *        rectangle probabilities, Kolmogorov-Smirnov distance, report output.
 */

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "modsym/enumerate.hpp"
#include "modsym/errors.hpp"
#include "modsym/io.hpp"
#include "modsym/modsym.hpp"
#include "modsym/numeric.hpp"

namespace modsym {

struct Sample {
  GroupElement gamma;
  double norm = 1.0;
  double x = 0.0, y = 0.0;
};

struct EmpiricalDistribution {
  std::vector<Sample> samples;
  double T = 0.0;
  std::size_t count() const { return samples.size(); }
};

/// One sample per coset with norm <= T, valued at the bracket [gamma, f].
inline EmpiricalDistribution build_distribution(const EnumerationResult& e,
                                                const std::map<GroupElement, NormalizedSymbol>& normalized,
                                                double T) {
  if (T > e.T) throw IncompleteEnumeration("distribution T exceeds the enumeration bound");
  EmpiricalDistribution d;
  d.T = T;
  for (const auto& r : e.reps) {
    if (r.norm > T) break;
    auto it = normalized.find(r.rep);
    if (it == normalized.end()) throw CoverageMismatch("no normalized symbol for " + r.rep.str());
    d.samples.push_back({r.rep, r.norm, it->second.bracket.real(), it->second.bracket.imag()});
  }
  return d;
}

/// Normalizes every symbol of the enumeration.
inline std::map<GroupElement, NormalizedSymbol> normalize_all(const EnumerationResult& e, const SymbolTable& t,
                                                              double vol, const PeterssonNorm& pn) {
  std::map<GroupElement, NormalizedSymbol> out;
  for (const auto& r : e.reps) out.emplace(r.rep, normalize(t.at(r.rep), r.norm, vol, pn));
  return out;
}

inline EmpiricalDistribution synthetic_distribution(const std::vector<std::pair<double, double>>& xy) {
  EmpiricalDistribution d;
  for (const auto& [x, y] : xy) d.samples.push_back({GroupElement(), 2.0, x, y});
  return d;
}

/// (1/count) sum x^n y^m.
inline double moments(const EmpiricalDistribution& d, int n, int m) {
  if (n < 0 || m < 0 || n + m > 6) throw DomainError("moments need n, m >= 0 and n + m <= 6");
  if (d.samples.empty()) throw EmptyDistribution("distribution has no samples");
  CompensatedSum<double> acc;
  for (const auto& s : d.samples) acc.add(std::pow(s.x, n) * std::pow(s.y, m));
  return acc.value() / static_cast<double>(d.count());
}

/// Gaussian limit n!/((n/2)! 2^{n/2}) m!/((m/2)! 2^{m/2}) for even n, m, else 0.
inline double moment_limit(int n, int m) {
  if (n % 2 != 0 || m % 2 != 0) return 0.0;
  auto df = [](int k) {
    double r = 1.0;
    for (int j = k - 1; j > 0; j -= 2) r *= j;
    return r;
  };
  return df(n) * df(m);
}

struct MomentTable {
  std::map<std::pair<int, int>, double> entries;
  std::map<std::pair<int, int>, double> limits;
};

inline MomentTable moment_table(const EmpiricalDistribution& d, int max_order = 6) {
  MomentTable t;
  for (int n = 0; n <= max_order; ++n)
    for (int m = 0; n + m <= max_order; ++m) {
      t.entries[{n, m}] = moments(d, n, m);
      t.limits[{n, m}] = moment_limit(n, m);
    }
  return t;
}

struct Rect {
  double x0, x1, y0, y1;
};

inline double rectangle_prob(const EmpiricalDistribution& d, const Rect& R) {
  if (d.samples.empty()) throw EmptyDistribution("distribution has no samples");
  std::size_t k = 0;
  for (const auto& s : d.samples)
    if (s.x >= R.x0 && s.x <= R.x1 && s.y >= R.y0 && s.y <= R.y1) ++k;
  return static_cast<double>(k) / static_cast<double>(d.count());
}

namespace detail {

/// Phi(b) - Phi(a) without cancellation in either tail.
inline double normal_interval(double a, double b) {
  if (a >= 0.0) return 0.5 * (std::erfc(a / std::numbers::sqrt2) - std::erfc(b / std::numbers::sqrt2));
  if (b <= 0.0) return 0.5 * (std::erfc(-b / std::numbers::sqrt2) - std::erfc(-a / std::numbers::sqrt2));
  return 1.0 - 0.5 * std::erfc(-a / std::numbers::sqrt2) - 0.5 * std::erfc(b / std::numbers::sqrt2);
}

}  // namespace detail

/// Standard bivariate Gaussian mass of an axis-aligned rectangle.
inline double gaussian_rect(const Rect& R) {
  return detail::normal_interval(R.x0, R.x1) * detail::normal_interval(R.y0, R.y1);
}

enum class Coord { x = 0, y = 1 };

/// Sup distance between the empirical CDF of one coordinate and the standard normal CDF.
inline double ks_statistic(const EmpiricalDistribution& d, Coord axis) {
  if (d.samples.empty()) throw EmptyDistribution("distribution has no samples");
  std::vector<double> v;
  v.reserve(d.count());
  for (const auto& s : d.samples) v.push_back(axis == Coord::x ? s.x : s.y);
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double best = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double F = normal_cdf(v[i]);
    best = std::max({best, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
  }
  return best;
}

// ---------------------------------------------------------------------------
// Output.

inline void write_distribution_csv(const EmpiricalDistribution& d, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path.string());
  os << "a,b,c,d,norm,x,y\n";
  for (const auto& s : d.samples) {
    os << s.gamma.a << ',' << s.gamma.b << ',' << s.gamma.c << ',' << s.gamma.d << ','
       << detail::format_double(s.norm) << ',' << detail::format_double(s.x) << ',' << detail::format_double(s.y)
       << '\n';
  }
}

inline const std::vector<Rect>& standard_rectangles() {
  static const std::vector<Rect> rects{{-1, 1, -1, 1}, {0, 1, 0, 1}, {-2, 2, -2, 2}, {0, 10, -10, 10}};
  return rects;
}

inline nlohmann::ordered_json distribution_report(const EmpiricalDistribution& d) {
  nlohmann::ordered_json j;
  j["T"] = d.T;
  j["count"] = d.count();
  nlohmann::ordered_json mom = nlohmann::ordered_json::array();
  const MomentTable t = moment_table(d);
  for (const auto& [key, val] : t.entries)
    mom.push_back({{"n", key.first}, {"m", key.second}, {"value", val}, {"limit", t.limits.at(key)}});
  j["moments"] = mom;
  j["ks"] = {{"x", ks_statistic(d, Coord::x)}, {"y", ks_statistic(d, Coord::y)}};
  nlohmann::ordered_json rects = nlohmann::ordered_json::array();
  for (const auto& R : standard_rectangles())
    rects.push_back({{"rect", {R.x0, R.x1, R.y0, R.y1}},
                     {"empirical", rectangle_prob(d, R)},
                     {"gaussian", gaussian_rect(R)}});
  j["rectangles"] = rects;
  return j;
}

/// Static SVG with the two marginal histograms and the normal density overlay.
inline std::string histogram_svg(const EmpiricalDistribution& d, int bins = 40, double range = 4.0) {
  if (d.samples.empty()) throw EmptyDistribution("distribution has no samples");
  const double W = 320, H = 220, pad = 30;
  auto panel = [&](Coord axis, double ox, const char* label) {
    std::vector<double> h(static_cast<std::size_t>(bins), 0.0);
    const double bw = 2.0 * range / bins;
    for (const auto& s : d.samples) {
      const double v = axis == Coord::x ? s.x : s.y;
      const int k = static_cast<int>(std::floor((v + range) / bw));
      if (k >= 0 && k < bins) h[static_cast<std::size_t>(k)] += 1.0;
    }
    const double scale = 1.0 / (static_cast<double>(d.count()) * bw);
    double ymax = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    for (double& c : h) {
      c *= scale;
      ymax = std::max(ymax, c);
    }
    ymax *= 1.1;
    auto px = [&](double v) { return ox + pad + (v + range) / (2.0 * range) * (W - 2 * pad); };
    auto py = [&](double p) { return H - pad - p / ymax * (H - 2 * pad); };
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(1);
    os << "<g>";
    for (int k = 0; k < bins; ++k) {
      const double x0 = px(-range + k * bw), x1 = px(-range + (k + 1) * bw), y = py(h[static_cast<std::size_t>(k)]);
      os << "<rect x=\"" << x0 << "\" y=\"" << y << "\" width=\"" << (x1 - x0) << "\" height=\"" << (H - pad - y)
         << "\" fill=\"#9ab\" stroke=\"#567\" stroke-width=\"0.5\"/>";
    }
    os << "<polyline fill=\"none\" stroke=\"#c33\" stroke-width=\"1.5\" points=\"";
    for (int k = 0; k <= 100; ++k) {
      const double v = -range + 2.0 * range * k / 100.0;
      os << px(v) << ',' << py(std::exp(-0.5 * v * v) / std::sqrt(2.0 * std::numbers::pi)) << ' ';
    }
    os << "\"/>";
    os << "<line x1=\"" << ox + pad << "\" y1=\"" << H - pad << "\" x2=\"" << ox + W - pad << "\" y2=\"" << H - pad
       << "\" stroke=\"#000\"/>";
    os << "<text x=\"" << ox + W / 2 << "\" y=\"" << H - 8 << "\" font-size=\"12\" text-anchor=\"middle\">" << label
       << "</text></g>";
    return os.str();
  };
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << 2 * W << "\" height=\"" << H + 20
      << "\" viewBox=\"0 0 " << 2 * W << ' ' << H + 20 << "\">";
  svg << "<text x=\"" << W << "\" y=\"14\" font-size=\"13\" text-anchor=\"middle\">T = "
      << detail::format_double(d.T) << ", n = " << d.count() << "</text>";
  svg << "<g transform=\"translate(0,20)\">" << panel(Coord::x, 0, "Re [gamma,f]") << panel(Coord::y, W, "Im [gamma,f]")
      << "</g></svg>\n";
  return svg.str();
}

}  // namespace modsym
