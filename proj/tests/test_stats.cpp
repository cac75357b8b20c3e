#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "modsym/stats.hpp"
#include "modsym/verify/oracles.hpp"
#include "testbed.hpp"

using namespace modsym;
namespace fs = std::filesystem;

namespace {

struct Normalized {
  EnumerationResult e;
  std::map<GroupElement, NormalizedSymbol> map;
};

const Normalized& normalized500() {
  static const Normalized n = [] {
    Normalized out;
    out.e = testbed::enumeration(500.0);
    const auto& t = testbed::symbols(out.e);
    const auto pn = testbed::workspace().petersson(out.e);
    out.map = normalize_all(out.e, t, covolume_gamma0(11), pn);
    return out;
  }();
  return n;
}

}  // namespace

TEST(Distribution, IdentityAndCount) {
  const auto& n = normalized500();
  const auto d = build_distribution(n.e, n.map, 500.0);
  EXPECT_EQ(d.count(), n.e.reps.size());
  ASSERT_EQ(d.samples.front().gamma, GroupElement::identity());
  EXPECT_EQ(d.samples.front().x, 0.0);
  EXPECT_EQ(d.samples.front().y, 0.0);
  EXPECT_EQ(build_distribution(n.e, n.map, 200.0).count(), n.e.count_upto(200.0));
  EXPECT_THROW(build_distribution(n.e, n.map, 600.0), IncompleteEnumeration);
}

TEST(Distribution, OrderInvariant) {
  const auto& n = normalized500();
  auto shuffled = n.e;
  std::reverse(shuffled.reps.begin(), shuffled.reps.end());
  std::stable_sort(shuffled.reps.begin(), shuffled.reps.end(),
                   [](const CosetRep& a, const CosetRep& b) { return a.norm < b.norm; });
  std::set<std::tuple<GroupElement, double, double>> a, b;
  for (const auto& s : build_distribution(n.e, n.map, 500.0).samples) a.insert({s.gamma, s.x, s.y});
  for (const auto& s : build_distribution(shuffled, n.map, 500.0).samples) b.insert({s.gamma, s.x, s.y});
  EXPECT_EQ(a, b);
}

TEST(Distribution, CoverageMismatch) {
  const auto& n = normalized500();
  auto partial = n.map;
  partial.erase(n.e.reps.back().rep);
  EXPECT_THROW(build_distribution(n.e, partial, 500.0), CoverageMismatch);
}

TEST(Moments, Degenerate) {
  const auto d = synthetic_distribution(std::vector<std::pair<double, double>>(10, {0.0, 0.0}));
  EXPECT_EQ(moments(d, 0, 0), 1.0);
  for (int k = 1; k <= 6; ++k) EXPECT_EQ(moments(d, k, 0), 0.0);
  EXPECT_EQ(moments(d, 1, 1), 0.0);
  EXPECT_THROW(moments(d, 4, 3), DomainError);
  EXPECT_THROW(moments(EmpiricalDistribution{}, 2, 0), EmptyDistribution);
}

TEST(Moments, MonteCarloGaussian) {
  const auto d = synthetic_distribution(oracle::gaussian_pairs(1000000, 12345));
  EXPECT_NEAR(moments(d, 2, 0), 1.0, 0.01);
  EXPECT_NEAR(moments(d, 0, 2), 1.0, 0.01);
  EXPECT_NEAR(moments(d, 4, 0), 3.0, 0.05);
  EXPECT_NEAR(moments(d, 2, 2), 1.0, 0.02);
  EXPECT_NEAR(moments(d, 1, 1), 0.0, 0.01);
  EXPECT_EQ(moment_limit(4, 2), 3.0);
  EXPECT_EQ(moment_limit(6, 0), 15.0);
  EXPECT_EQ(moment_limit(3, 0), 0.0);
}

TEST(Rectangles, GaussianValues) {
  EXPECT_NEAR(gaussian_rect({-10, 10, -10, 10}), 1.0, 1e-20);
  EXPECT_NEAR(gaussian_rect({0, 10, -10, 10}), 0.5, 1e-15);
  const double e1 = std::erf(1.0 / std::sqrt(2.0));
  EXPECT_NEAR(gaussian_rect({-1, 1, -1, 1}), e1 * e1, 1e-15);
  EXPECT_NEAR(gaussian_rect({-1, 1, -1, 1}), 0.4660, 1e-4);
  const auto d = synthetic_distribution({{0.0, 0.0}, {1.0, 1.0}, {2.0, 0.0}, {-0.5, 3.0}});
  EXPECT_EQ(rectangle_prob(d, {-1, 1, -1, 1}), 0.5);
}

TEST(Ks, MonteCarloAndPointMass) {
  const auto d = synthetic_distribution(oracle::gaussian_pairs(100000, 777));
  EXPECT_LE(ks_statistic(d, Coord::x), 0.01);
  EXPECT_LE(ks_statistic(d, Coord::y), 0.01);
  const auto z = synthetic_distribution(std::vector<std::pair<double, double>>(50, {0.0, 0.0}));
  EXPECT_NEAR(ks_statistic(z, Coord::x), 0.5, 1e-15);
}

TEST(Output, CsvAndSvg) {
  const auto& n = normalized500();
  const auto d = build_distribution(n.e, n.map, 500.0);
  const auto dir = fs::temp_directory_path() / "modsym_tests";
  fs::create_directories(dir);
  write_distribution_csv(d, dir / "dist.csv");
  std::ifstream is(dir / "dist.csv");
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "a,b,c,d,norm,x,y");
  std::getline(is, line);
  EXPECT_EQ(line, "1,0,0,1,1,0,0");
  const std::string svg = histogram_svg(d);
  EXPECT_LE(svg.size(), 50u * 1024u);
  EXPECT_EQ(svg.find("<script"), std::string::npos);
  EXPECT_EQ(svg.find("on"
                     "load"),
            std::string::npos);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  const auto j = distribution_report(d);
  EXPECT_EQ(j["count"], d.count());
  EXPECT_EQ(j["rectangles"].size(), 4u);
}

TEST(Distribution, TrendsReported) {
  const auto e = testbed::enumeration(2000.0);
  const auto& t = testbed::symbols(e);
  const auto pn = testbed::workspace().petersson(e);
  const auto map = normalize_all(e, t, covolume_gamma0(11), pn);
  for (double T : {250.0, 500.0, 1000.0, 2000.0}) {
    const auto d = build_distribution(e, map, T);
    const std::string k = std::to_string(static_cast<int>(T));
    RecordProperty("M20_" + k, std::to_string(moments(d, 2, 0)));
    RecordProperty("M40_" + k, std::to_string(moments(d, 4, 0)));
    RecordProperty("KSx_" + k, std::to_string(ks_statistic(d, Coord::x)));
    // Conjugation by diag(1,-1) maps gamma1 to its inverse and makes the x-marginal symmetric.
    EXPECT_NEAR(moments(d, 1, 0), 0.0, 1e-12);
    EXPECT_NEAR(moments(d, 0, 0), 1.0, 1e-15);
  }
}
