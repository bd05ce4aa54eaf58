#include <gtest/gtest.h>

#include <cmath>

#include "jgl/errors.hpp"
#include "jgl/numerics.hpp"
#include "jgl/quadrature.hpp"
#include "support.hpp"

using namespace jgl;
using jgl::test::num;
using jgl::test::rel_diff;

namespace {

Real erfc_by_quadrature(const Real& x, const PrecisionContext& ctx) {
  const Precision p = ctx.precision();
  const Real c = 2 / sqrt(pi(p));
  return integrate([&](const Real& t) { return c * exp(-square(t)); }, x, Real(16.0, p), ctx);
}

}  // namespace

TEST(Erfc, ZeroIsOne) {
  const PrecisionContext ctx(128);
  PrecisionScope scope(128);
  EXPECT_LT(rel_diff(eval_erfc(Real(0.0), ctx), Real(1.0)), std::ldexp(1.0, -120));
}

TEST(Erfc, HalfAgainstQuadrature) {
  const PrecisionContext ctx(256);
  PrecisionScope scope(256);
  const Real x = num("0.5", 256);
  const Real got = eval_erfc(x, ctx);
  EXPECT_LT(rel_diff(got, erfc_by_quadrature(x, ctx)), 1e-70);
  EXPECT_LT(rel_diff(got, num("0.47950012218695346231725334610803547126354842424204", 256)), 1e-48);
}

TEST(Erfc, TailBranchAgainstQuadrature) {
  const PrecisionContext ctx(256);
  PrecisionScope scope(256);
  for (const char* s : {"1.6", "3.7", "6.25"}) {
    const Real x = num(s, 256);
    const Real got = eval_erfc(x, ctx);
    EXPECT_LT((abs(got - erfc_by_quadrature(x, ctx)) / got).to_double(), 1e-65) << s;
  }
}

TEST(Erfc, Reflection) {
  const PrecisionContext ctx(192);
  PrecisionScope scope(192);
  const Real x = num("1.25", 192);
  EXPECT_LT(rel_diff(eval_erfc(x, ctx) + eval_erfc(-x, ctx), Real(2.0)), 1e-55);
}

TEST(Erfc, StableUnderPrecisionDoubling) {
  for (const char* s : {"-2.5", "-0.3", "0.8", "1.5", "4.2", "9.0"}) {
    const PrecisionContext lo(128);
    const Real a = eval_erfc(num(s, 128), lo);
    const Real b = eval_erfc(num(s, 256), lo.doubled());
    PrecisionScope scope(256);
    EXPECT_LT((abs(Real(a, Precision{256}) - b) / b).to_double(), lo.agree_tol()) << s;
  }
}

TEST(DirectionalDiff, Square) {
  const PrecisionContext ctx(128);
  PrecisionScope scope(128);
  const auto d = directional_diff([](const Real& s1, const Real&) { return square(s1); },
                                  Point2{Real(1.0), Real(0.0)}, Point2{Real(1.0), Real(0.0)}, std::nullopt, 1, ctx);
  EXPECT_LT(rel_diff(d.value, Real(2.0)), 1e-25);
}

TEST(DirectionalDiff, ErfcSlopeAtZero) {
  const PrecisionContext ctx(256);
  PrecisionScope scope(256);
  const auto d = directional_diff([&](const Real& s1, const Real&) { return eval_erfc(s1, ctx); },
                                  Point2{Real(0.0), Real(0.0)}, Point2{Real(1.0), Real(0.0)}, std::nullopt, 1, ctx);
  EXPECT_LT(rel_diff(d.value, -2 / sqrt(pi())), 1e-40);
}

TEST(DirectionalDiff, SecondOrderAlongDiagonal) {
  const PrecisionContext ctx(128);
  PrecisionScope scope(128);
  const auto d = directional_diff([](const Real& s1, const Real& s2) { return s1 * s2; }, Point2{Real(1.0), Real(2.0)},
                                  Point2{Real(1.0), Real(1.0)}, std::nullopt, 2, ctx);
  EXPECT_LT(rel_diff(d.value, Real(2.0)), 1e-15);
}

TEST(DirectionalDiff, StepUnderflowIsRejected) {
  const PrecisionContext ctx(128);
  PrecisionScope scope(128);
  auto f = [](const Real& s1, const Real&) { return s1; };
  EXPECT_THROW(directional_diff(f, Point2{Real(0.0), Real(0.0)}, Point2{Real(1.0), Real(0.0)}, num("1e-30", 128), 1,
                                ctx),
               StepUnderflow);
}

TEST(DirectionalDiff, RichardsonOrderAtLeastThreePointFive) {
  const PrecisionContext ctx(256);
  PrecisionScope scope(256);
  auto f = [](const Real& s1, const Real& s2) { return exp(s1) * log(2 + s2); };
  const Point2 at{num("0.3", 256), num("0.4", 256)};
  const Point2 dir{Real(1.0), Real(1.0)};
  const Real exact = exp(at.s1) * log(2 + at.s2) + exp(at.s1) / (2 + at.s2);
  const auto a = directional_diff(f, at, dir, num("1e-2", 256), 1, ctx);
  const auto b = directional_diff(f, at, dir, num("5e-3", 256), 1, ctx);
  const double order = std::log2((abs(a.value - exact) / abs(b.value - exact)).to_double());
  EXPECT_GE(order, 3.5);
}

TEST(DirectionalDiff, VectorFormMatchesScalarForm) {
  const PrecisionContext ctx(128);
  PrecisionScope scope(128);
  auto g = [](const Real& s1, const Real& s2) { return exp(s1 - s2); };
  auto vec = [&](const Real& s1, const Real& s2) { return std::vector<Real>{g(s1, s2), square(s2)}; };
  const Point2 at{Real(0.2), Real(-0.1)};
  const Point2 dir{Real(1.0), Real(1.0)};
  const auto v = directional_diff(vec, at, dir, std::nullopt, 1, ctx);
  const auto s = directional_diff(g, at, dir, std::nullopt, 1, ctx);
  EXPECT_TRUE(v[0].value == s.value);
  EXPECT_LT(rel_diff(v[1].value, Real(-0.2)), 1e-25);
}

TEST(Quadrature, GaussianMass) {
  const PrecisionContext ctx(192);
  PrecisionScope scope(192);
  const Real got = integrate([](const Real& x) { return exp(-square(x)); }, Real(-16.0), Real(16.0), ctx);
  EXPECT_LT(rel_diff(got, sqrt(pi())), 1e-50);
}
