#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "modsym/modsym.hpp"
#include "modsym/verify/oracles.hpp"
#include "testbed.hpp"

using namespace modsym;
namespace fs = std::filesystem;

namespace {

std::vector<SymbolValue> symbols_upto(double T) {
  const auto e = testbed::enumeration(T);
  const auto& t = testbed::symbols(e);
  std::vector<SymbolValue> v;
  for (const auto& r : e.reps) v.push_back(t.at(r.rep));
  return v;
}

}  // namespace

TEST(Symbol, ExactZeros) {
  const auto q = eta_expansion_11(10);
  for (const auto& g : {GroupElement::identity(), GroupElement(1, 5, 0, 1), GroupElement(1, -3, 0, 1)}) {
    const auto s = symbol(g, q, 10);
    EXPECT_EQ(s.value, cplx(0.0, 0.0));
    EXPECT_EQ(s.abs_err, 0.0);
  }
}

TEST(Symbol, NonMemberRejected) { EXPECT_THROW(symbol(GroupElement(0, -1, 1, 0), eta_expansion_11(10), 10), DomainError); }

TEST(Symbol, TermCountAndShortfall) {
  EXPECT_GT(symbol_terms(110, 10), symbol_terms(11, 10));
  EXPECT_GT(symbol_terms(11, 12), symbol_terms(11, 10));
  EXPECT_THROW(symbol(GroupElement(1, 0, 11, 1), eta_expansion_11(3), 10), InsufficientCoefficients);
}

TEST(Symbol, AdditivityAndInversion) {
  const auto e = testbed::enumeration(200.0);
  const auto& q = testbed::coefficients(2000000);
  std::mt19937_64 gen(42);
  std::uniform_int_distribution<std::size_t> pick(0, e.reps.size() - 1);
  int done = 0;
  while (done < 100) {
    const auto& x = e.reps[pick(gen)].rep;
    const auto& y = e.reps[pick(gen)].rep;
    const GroupElement p = x * y;
    if (symbol_terms(p.c, 10) > q.M()) continue;
    const auto sx = symbol(x, q, 10), sy = symbol(y, q, 10), sp = symbol(p, q, 10);
    const double err = sx.abs_err + sy.abs_err + sp.abs_err;
    EXPECT_LE(std::abs(sp.value - sx.value - sy.value), err);
    EXPECT_LE(err, 1e-8);
    const auto si = symbol(x.inverse(), q, 10);
    EXPECT_LE(std::abs(si.value + sx.value), si.abs_err + sx.abs_err);
    ++done;
  }
}

TEST(Symbol, PathIndependenceOracle) {
  const auto& q = testbed::coefficients(200000);
  const std::vector<GroupElement> gs{GroupElement(1, 0, 11, 1), GroupElement(2, 1, 11, 6), GroupElement(3, -1, 22, -7),
                                     GroupElement(-2, -1, 11, 5), GroupElement(4, 1, 11, 3)};
  for (const auto& g : gs) {
    const HPoint z0(-static_cast<double>(g.d) / g.c, 1.0 / g.c);
    const auto s = symbol(g, q, 12);
    const cplx path = oracle::path_symbol(q, z0, act(g, z0));
    EXPECT_NEAR(std::abs(path - s.value), 0.0, 1e-6) << g.str() << " two-point " << s.value << " path " << path;
  }
}

TEST(Gamma1, CommutatorHasVanishingSymbol) {
  const auto& ctx = testbed::context();
  EXPECT_GT(std::abs(ctx.gamma1.trace()), 2);
  const auto& q = testbed::coefficients(symbol_terms(ctx.gamma1.c, 12));
  const auto s = symbol(ctx.gamma1, q, 12);
  EXPECT_LE(s.abs_err, 1e-10);
  EXPECT_LE(std::abs(s.value), 1e-10);
}

TEST(Gamma1, ParabolicPoolRejected) { EXPECT_THROW(build_gamma1({GroupElement(1, 1, 0, 1)}), NoSuitablePair); }

TEST(Lattice, CollinearRejected) {
  const cplx w(0.7, 0.2);
  std::vector<SymbolValue> v{{GroupElement(), w, 0.0}, {GroupElement(), 2.0 * w, 0.0}};
  EXPECT_THROW(period_lattice(v), DegenerateLattice);
}

TEST(Lattice, SyntheticRecovery) {
  const cplx w1(1.3, 0.0), w2(0.4, 1.1);
  std::vector<SymbolValue> v;
  for (cplx z : {w1, w2, w1 + w2, 3.0 * w1 - w2}) v.push_back({GroupElement(), z, 0.0});
  const auto L = period_lattice(v);
  EXPECT_NEAR(L.covolume, std::abs(w1.real() * w2.imag() - w1.imag() * w2.real()), 1e-12);
  for (cplx z : {w1, w2, w1 - w2, 5.0 * w2 + 2.0 * w1}) EXPECT_LE(lattice_distance(L, z), 1e-12);
  EXPECT_GT(lattice_distance(L, 0.5 * w1), 0.1);
}

TEST(Lattice, TestbedMembershipAndStability) {
  const auto v200 = symbols_upto(200.0), v500 = symbols_upto(500.0);
  const auto L200 = period_lattice(v200), L500 = period_lattice(v500);
  std::size_t inside = 0;
  for (const auto& s : v500)
    if (lattice_distance(L500, s.value) <= 1e-5) ++inside;
  EXPECT_GE(static_cast<double>(inside), 0.99 * static_cast<double>(v500.size()));
  const double p200 = petersson_norm(L200).value, p500 = petersson_norm(L500).value;
  EXPECT_GT(p500, 0.0);
  EXPECT_NEAR(p200, p500, 1e-4 * p500);
}

TEST(Petersson, FormulaIdentity) {
  PeriodLattice L;
  L.covolume = 4.0 * std::numbers::pi * std::numbers::pi;
  EXPECT_NEAR(petersson_norm(L).value, 1.0, 1e-15);
}

TEST(Petersson, QuadratureMatchesLattice) {
  const auto& q = testbed::coefficients(200000);
  const double lattice = petersson_norm(period_lattice(symbols_upto(200.0))).value;
  const double quad = petersson_norm_quadrature(q).value;
  EXPECT_NEAR(quad, lattice, 1e-6 * lattice);
}

TEST(Petersson, SubdomainParseval) {
  // int_{|x|<=1/2, y>=y0} |f|^2 dx dy = sum |a_n|^2 e^{-4 pi n y0} / (4 pi n).
  const auto q = eta_expansion_11(2000);
  const double y0 = 0.9;
  CompensatedSum<double> series;
  for (i64 n = 1; n <= q.M(); ++n) {
    const double an = static_cast<double>(q.a(n));
    series.add(an * an * std::exp(-4.0 * std::numbers::pi * n * y0) / (4.0 * std::numbers::pi * n));
  }
  const double quad = quad::integrate(
      [&](double x) {
        return quad::integrate([&](double y) { return std::norm(eval_f(q, HPoint(x, y), 1e-16).value); }, y0, 12.0,
                               1e-10);
      },
      -0.5, 0.5, 1e-10);
  EXPECT_NEAR(quad, series.value(), 1e-3 * series.value());
}

TEST(Normalize, Conventions) {
  const PeterssonNorm pn{0.05, NormMethod::lattice_area};
  const double vol = 4.0 * std::numbers::pi;
  const SymbolValue s{GroupElement(), cplx(0.0, 1.2692), 0.0};
  EXPECT_EQ(normalize(s, 1.0, vol, pn).bracket, cplx(0.0, 0.0));
  EXPECT_EQ(normalize(SymbolValue{GroupElement(), 0.0, 0.0}, 7.0, vol, pn).bracket, cplx(0.0, 0.0));
  const auto a = normalize(s, 7.0, vol, pn);
  const auto b = normalize(s, 7.0, vol, PeterssonNorm{4.0 * pn.value, NormMethod::lattice_area});
  EXPECT_NEAR(std::abs(b.bracket), 0.5 * std::abs(a.bracket), 1e-15);
  EXPECT_NEAR(std::abs(a.bracket), std::abs(a.tilde) / std::sqrt(std::log(7.0)), 1e-14);
}

TEST(Symbol, PurityOfTwistedSymbols) {
  const auto v = symbols_upto(200.0);
  for (const auto& s : v) {
    // <gamma, Re f dz> = -2 pi i Re int f and <gamma, Im f dz> = -2 pi i Im int f are purely imaginary,
    // and their combination recovers the symbol.
    const cplx I = symbol_integral(s.value);
    const cplx al(0.0, -2.0 * std::numbers::pi * I.real()), be(0.0, -2.0 * std::numbers::pi * I.imag());
    EXPECT_NEAR(std::abs(al + cplx(0.0, 1.0) * be - s.value), 0.0, 1e-12);
  }
}

TEST(Symbol, CrudeBoundStable) {
  const auto e = testbed::enumeration(500.0);
  const auto& t = testbed::symbols(e);
  const HPoint i(0.0, 1.0);
  auto worst_upto = [&](double T) {
    double worst = 0.0;
    for (const auto& r : e.reps) {
      if (r.norm > T) break;
      worst = std::max(worst, std::abs(symbol_integral(t.at(r.rep).value)) * weight(r.conj, i));
    }
    return worst;
  };
  const double w250 = worst_upto(250.0), w500 = worst_upto(500.0);
  RecordProperty("crude_bound_max_250", std::to_string(w250));
  RecordProperty("crude_bound_max_500", std::to_string(w500));
  EXPECT_LE(w500, 1.10 * w250);
}

TEST(SymbolCache, RoundTrip) {
  const auto e = testbed::enumeration(60.0);
  const auto& t = testbed::symbols(e);
  const auto dir = fs::temp_directory_path() / "modsym_tests";
  fs::create_directories(dir);
  const auto path = dir / "symbols.csv";
  save_symbols(t, path);
  const auto back = load_symbols(path);
  EXPECT_EQ(back.digits(), t.digits());
  ASSERT_EQ(back.size(), t.size());
  for (const auto& [g, s] : t.values()) {
    EXPECT_EQ(back.at(g).value, s.value);
    EXPECT_EQ(back.at(g).abs_err, s.abs_err);
  }
  EXPECT_THROW(back.at(GroupElement(1, 7, 0, 1)), MissingSymbols);
}
