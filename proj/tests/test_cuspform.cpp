#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "modsym/cuspform.hpp"
#include "modsym/verify/oracles.hpp"
#include "testbed.hpp"

using namespace modsym;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "modsym_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace

TEST(Eta11, LeadingCoefficients) {
  const auto q = eta_expansion_11(12);
  const std::vector<i64> want{1, -2, -1, 2, 1, 2, -2, 0, -2, -2, 1, -2};
  EXPECT_EQ(q.coeffs(), want);
  EXPECT_EQ(q.level(), 11);
  EXPECT_EQ(q.weight(), 2);
}

TEST(Eta11, Multiplicativity) {
  const auto q = eta_expansion_11(200);
  EXPECT_EQ(q.a(6), q.a(2) * q.a(3));
  EXPECT_EQ(q.a(10), q.a(2) * q.a(5));
  EXPECT_EQ(q.a(15), q.a(3) * q.a(5));
  EXPECT_EQ(q.a(4), q.a(2) * q.a(2) - 2);
  EXPECT_EQ(q.a(9), q.a(3) * q.a(3) - 3);
  EXPECT_EQ(q.a(121), q.a(11) * q.a(11));
}

TEST(Eta11, MatchesDenseProduct) {
  const i64 M = 3000;
  EXPECT_EQ(eta_expansion_11(M).coeffs(), oracle::eta11_dense(M));
}

TEST(Eta11, DeligneBound) {
  const auto q = eta_expansion_11(20000);
  for (i64 n = 1; n <= q.M(); ++n) {
    i64 d = 0;
    for (i64 k = 1; k * k <= n; ++k)
      if (n % k == 0) d += (k * k == n) ? 1 : 2;
    EXPECT_LE(std::abs(static_cast<double>(q.a(n))), d * std::sqrt(static_cast<double>(n)) + 1e-9) << n;
  }
}

TEST(QExpansion, Validation) {
  EXPECT_THROW(QExpansion(11, {}), FormatError);
  EXPECT_THROW(QExpansion(11, {0, 1}), FormatError);
  EXPECT_THROW(QExpansion(11, {1, 5}), BoundViolation);
  const QExpansion loose(11, {1, 5}, true);
  EXPECT_FALSE(loose.certified());
  EXPECT_TRUE(eta_expansion_11(3).certified());
}

TEST(CoeffFile, RoundTripByteStable) {
  const auto q = eta_expansion_11(500);
  const auto p1 = temp_file("coeffs1.txt"), p2 = temp_file("coeffs2.txt");
  save_coeffs(q, p1);
  const auto back = load_coeffs(p1);
  EXPECT_EQ(back, q);
  save_coeffs(back, p2);
  EXPECT_EQ(slurp(p1), slurp(p2));
  std::ifstream is(p1);
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "# qexp N=11 k=2 M=500");
  std::getline(is, line);
  EXPECT_EQ(line, "1 1");
}

TEST(CoeffFile, HandWrittenMatchesEta) {
  const auto p = temp_file("hand5.txt");
  std::ofstream(p) << "# qexp N=11 k=2 M=5\n1 1\n2 -2\n3 -1\n4 2\n5 1\n";
  EXPECT_EQ(load_coeffs(p), eta_expansion_11(5));
}

TEST(CoeffFile, Unnormalized) {
  const auto p = temp_file("a1zero.txt");
  std::ofstream(p) << "# qexp N=11 k=2 M=2\n1 0\n2 -2\n";
  EXPECT_THROW(load_coeffs(p), FormatError);
}

TEST(CoeffFile, Malformed) {
  const auto p = temp_file("bad.txt");
  std::ofstream(p) << "# qexp N=11 k=2 M=3\n1 1\n3 -1\n";
  EXPECT_THROW(load_coeffs(p), FormatError);
  std::ofstream(p) << "# qexp N=11 k=2 M=3\n1 1\n2 -2\n";
  EXPECT_THROW(load_coeffs(p), FormatError);
  std::ofstream(p) << "# qexp N=11 k=4 M=1\n1 1\n";
  EXPECT_THROW(load_coeffs(p), FormatError);
}

TEST(CoeffFile, TamperedBound) {
  const auto p = temp_file("tampered.txt");
  std::ofstream(p) << "# qexp N=11 k=2 M=3\n1 1\n2 -2\n3 900\n";
  EXPECT_THROW(load_coeffs(p), BoundViolation);
  EXPECT_FALSE(load_coeffs(p, true).certified());
}

TEST(EvalF, SingleTermDominance) {
  const auto q = eta_expansion_11(100);
  const auto v = eval_f(q, HPoint(0.0, 10.0), 1e-300);
  const double lead = std::exp(-20.0 * std::numbers::pi);
  EXPECT_LE(std::abs(v.value - lead), 3.0 * 2.0 * std::exp(-40.0 * std::numbers::pi));
}

TEST(EvalF, PeriodOne) {
  const auto q = eta_expansion_11(2000);
  for (double x : {-0.37, 0.0, 0.25, 0.49}) {
    const HPoint z(x, 0.6), z1(x + 1.0, 0.6);
    const auto a = eval_f(q, z, 1e-14), b = eval_f(q, z1, 1e-14);
    EXPECT_NEAR(std::abs(a.value - b.value), 0.0, 1e-13);
  }
}

TEST(EvalF, HighPrecisionReference) {
  const auto q = eta_expansion_11(5000);
  const HPoint z(0.3, 0.8);
  const auto v = eval_f(q, z, 1e-14);
  const cplx ref = oracle::eval_f_reference(q, z, 5000);
  EXPECT_LE(std::abs(v.value - ref), v.tail_bound + 1e-15);
}

TEST(EvalF, TailCertificateHonored) {
  const auto q = eta_expansion_11(20000);
  for (double y : {0.05, 0.2, 1.0}) {
    const HPoint z(0.17, y);
    const auto coarse = eval_f(q, z, 1e-6), fine = eval_f(q, z, 1e-15);
    EXPECT_LE(std::abs(coarse.value - fine.value), coarse.tail_bound + fine.tail_bound + 1e-13);
    EXPECT_LE(coarse.tail_bound, 1e-6);
  }
}

TEST(EvalF, InsufficientCoefficients) {
  const auto q = eta_expansion_11(10);
  EXPECT_THROW(eval_f(q, HPoint(0.0, 0.01), 1e-12), InsufficientCoefficients);
}

TEST(EvalF, WeightTwoTransformation) {
  // The 20 elements of Gamma_0(11) with the smallest norm at i, excluding translations.
  std::vector<GroupElement> pool;
  for (i64 c = 11; c <= 44; c += 11)
    for (i64 d = -12; d <= 12; ++d)
      for (i64 a = -12; a <= 12; ++a) {
        if ((a * d - 1) % c != 0) continue;
        pool.emplace_back(a, (a * d - 1) / c, c, d);
      }
  std::sort(pool.begin(), pool.end(), [](const GroupElement& x, const GroupElement& y) {
    const auto nx = norm_sq_at_i(x), ny = norm_sq_at_i(y);
    return nx != ny ? nx < ny : x < y;
  });
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  pool.resize(20);
  const auto& q = testbed::coefficients(200000);
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> ux(-0.5, 0.5), uy(0.5, 1.5);
  for (const auto& g : pool) {
    for (int k = 0; k < 10; ++k) {
      const HPoint z(ux(gen), uy(gen));
      const HPoint w = act(g, z);
      const auto fz = eval_f(q, z, 1e-13), fw = eval_f(q, w, 1e-13);
      const double lhs = w.y * std::abs(fw.value), rhs = z.y * std::abs(fz.value);
      EXPECT_NEAR(lhs, rhs, 1e-11 + w.y * fw.tail_bound + z.y * fz.tail_bound) << g.str();
    }
  }
}

TEST(Antiderivative, DerivativeMatchesF) {
  const auto q = eta_expansion_11(5000);
  const HPoint z(0.1, 0.4);
  const double h = 1e-5;
  const cplx F1 = eval_antiderivative(q, HPoint(z.x + h, z.y), 1e-15).value;
  const cplx F0 = eval_antiderivative(q, HPoint(z.x - h, z.y), 1e-15).value;
  const cplx f = eval_f(q, z, 1e-15).value;
  // F = sum a_n q^n / n, dF/dz = 2 pi i f.
  const cplx dF = (F1 - F0) / (2.0 * h);
  EXPECT_NEAR(std::abs(dF - cplx(0.0, 2.0 * std::numbers::pi) * f), 0.0, 1e-7);
}
