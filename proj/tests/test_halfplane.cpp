#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "modsym/halfplane.hpp"
#include "testbed.hpp"

using namespace modsym;

TEST(GroupElement, CanonicalSign) {
  const GroupElement m(-2, -1, -1, -1);
  EXPECT_EQ(m, GroupElement(2, 1, 1, 1));
  EXPECT_GT(m.c, 0);
  const GroupElement t(-1, 3, 0, -1);
  EXPECT_EQ(t.a, 1);
  EXPECT_EQ(t.b, -3);
}

TEST(GroupElement, DeterminantRequired) { EXPECT_THROW(GroupElement(1, 1, 1, 1), DomainError); }

TEST(GroupElement, InverseAndPow) {
  const GroupElement m(2, 1, 1, 1);
  EXPECT_EQ(m * m.inverse(), GroupElement::identity());
  EXPECT_EQ(m.pow(3), m * m * m);
  EXPECT_EQ(m.pow(-2), m.inverse() * m.inverse());
}

TEST(GroupElement, OverflowDetected) {
  EXPECT_NO_THROW(GroupElement(2, 1, 1, 1).pow(40));
  EXPECT_THROW(GroupElement(2, 1, 1, 1).pow(60), OverflowError);
}

TEST(Act, Examples) {
  const HPoint i(0.0, 1.0);
  const HPoint a = act(GroupElement::identity(), i);
  EXPECT_DOUBLE_EQ(a.x, 0.0);
  EXPECT_DOUBLE_EQ(a.y, 1.0);
  const HPoint b = act(GroupElement(1, 1, 0, 1), i);
  EXPECT_DOUBLE_EQ(b.x, 1.0);
  EXPECT_DOUBLE_EQ(b.y, 1.0);
  const HPoint c = act(GroupElement(0, -1, 1, 0), HPoint(0.0, 2.0));
  EXPECT_NEAR(c.x, 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(c.y, 0.5);
}

TEST(Weight, Examples) {
  const HPoint i(0.0, 1.0);
  EXPECT_DOUBLE_EQ(weight(GroupElement::identity(), i), 1.0);
  const double mu = 6.8541;
  EXPECT_NEAR(weight(RealMatrix::diag(std::sqrt(mu), 1.0 / std::sqrt(mu)), i), 1.0, 1e-15);
  EXPECT_NEAR(weight(GroupElement(1, 1, 0, 1), i), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(NormAt, Examples) {
  const HPoint i(0.0, 1.0);
  EXPECT_DOUBLE_EQ(norm_at(GroupElement::identity(), i), 1.0);
  EXPECT_NEAR(norm_at(GroupElement(1, 1, 0, 1), i), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(norm_at(GroupElement(2, 1, 1, 1), i), std::sqrt(10.0), 1e-14);
}

namespace {

GroupElement random_element(std::mt19937_64& gen) {
  std::uniform_int_distribution<i64> u(-30, 30);
  for (;;) {
    const i64 c = u(gen), d = u(gen);
    if (c == 0 && d == 0) continue;
    i64 x0 = 1, x1 = 0, r0 = c, r1 = d, y0 = 0, y1 = 1;
    while (r1 != 0) {
      const i64 q = r0 / r1;
      std::tie(r0, r1) = std::make_pair(r1, r0 - q * r1);
      std::tie(x0, x1) = std::make_pair(x1, x0 - q * x1);
      std::tie(y0, y1) = std::make_pair(y1, y0 - q * y1);
    }
    if (std::abs(r0) != 1) continue;
    // x0 c + y0 d = r0, so (y0 r0) d - (-x0 r0) c = 1.
    const i64 a = y0 * r0, b = -x0 * r0;
    return GroupElement(a, b, c, d);
  }
}

}  // namespace

TEST(Act, Composition) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> ux(-2, 2), uy(0.2, 3);
  for (int k = 0; k < 200; ++k) {
    const auto m1 = random_element(gen), m2 = random_element(gen);
    const HPoint z(ux(gen), uy(gen));
    const HPoint lhs = act(m1, act(m2, z)), rhs = act(m1 * m2, z);
    EXPECT_NEAR(lhs.x, rhs.x, 1e-10 * (1 + std::abs(rhs.x)));
    EXPECT_NEAR(lhs.y, rhs.y, 1e-10 * (1 + rhs.y));
  }
}

TEST(NormAt, ExactCrossCheckAndLowerBound) {
  std::mt19937_64 gen(2);
  for (int k = 0; k < 500; ++k) {
    const auto m = random_element(gen);
    const double n = norm_at(m, HPoint(0.0, 1.0));
    EXPECT_NEAR(n * n, static_cast<double>(norm_sq_at_i(m)), 1e-12 * n * n);
    EXPECT_GE(n, 1.0 - 1e-15);
  }
}

TEST(Hyperbolic, ParabolicRejected) { EXPECT_THROW(analyze_hyperbolic(GroupElement(1, 1, 0, 1)), NotHyperbolic); }

TEST(Hyperbolic, GoldenExample) {
  const auto ctx = analyze_hyperbolic(GroupElement(2, 1, 1, 1));
  const double lam = (3.0 + std::sqrt(5.0)) / 2.0;
  EXPECT_NEAR(ctx.mu, lam * lam, 1e-12);
  EXPECT_NEAR(ctx.mu, 6.8541, 1e-4);
  const RealMatrix c = ctx.conjugate(ctx.gamma1);
  EXPECT_NEAR(c.a, std::sqrt(ctx.mu), 1e-9);
  EXPECT_NEAR(c.d, 1.0 / std::sqrt(ctx.mu), 1e-9);
  EXPECT_NEAR(c.b, 0.0, 1e-9);
  EXPECT_NEAR(c.c, 0.0, 1e-9);
}

TEST(Hyperbolic, DiagonalizerMapsFixedPoints) {
  for (const auto& g : {GroupElement(2, 1, 1, 1), testbed::context().gamma1, GroupElement(-2, -1, 11, 5)}) {
    const auto ctx = analyze_hyperbolic(g);
    // p_plus -> infinity: the denominator c p + d vanishes.
    EXPECT_NEAR(ctx.g.c * ctx.p_plus + ctx.g.d, 0.0, 1e-9);
    // p_minus -> 0: the numerator a p + b vanishes.
    EXPECT_NEAR(ctx.g.a * ctx.p_minus + ctx.g.b, 0.0, 1e-9);
    EXPECT_NEAR(ctx.g.det(), 1.0, 1e-9);
    EXPECT_GT(ctx.mu, 1.0);
  }
}

TEST(Hyperbolic, AlreadyDiagonalInput) {
  // (2 1; 1 1) has no diagonal integer conjugate; use a real diagonal matrix directly.
  const RealMatrix d = RealMatrix::diag(3.0, 1.0 / 3.0);
  const RealMatrix g = real_diagonalizer(d);
  EXPECT_NEAR(g.b, 0.0, 1e-15);
  EXPECT_NEAR(g.c, 0.0, 1e-15);
}

TEST(Hyperbolic, WeightInvariantUnderGamma1Powers) {
  const auto& ctx = testbed::context();
  std::mt19937_64 gen(3);
  const HPoint z(0.2, 1.3);
  for (int k = 0; k < 10; ++k) {
    GroupElement m = random_element(gen);
    while (m.c % 11 != 0) m = random_element(gen);
    const double w0 = weight(ctx.conjugate(m), z);
    for (int n = -1; n <= 1; ++n) {
      const double w = weight(ctx.conjugate(ctx.gamma1.pow(n) * m), z);
      EXPECT_NEAR(w, w0, 1e-10);
    }
  }
}

TEST(Covolume, Level11) { EXPECT_NEAR(covolume_gamma0(11), 4.0 * std::numbers::pi, 1e-14); }
