#include <gtest/gtest.h>

#include <cmath>

#include "jgl/errors.hpp"
#include "jgl/painleve4.hpp"
#include "support.hpp"

using namespace jgl;
using jgl::test::num;
using jgl::test::rel_diff;

namespace {

const WeightParams kStrict = WeightParams::make(1, -0.5, 0.3, -0.7, 0.9);

PIVState strict_state(int n, const PrecisionContext& ctx) {
  const auto sys = build_ortho_system(kStrict, n, ctx);
  return to_piv_state(aux_quantities(n, sys, ctx), sys, n);
}

}  // namespace

TEST(PIVState, Consistency) {
  const PrecisionContext ctx(512);
  const auto reports = check_piv_state(kStrict, 6, ctx);
  ASSERT_EQ(reports.size(), 7u);
  for (const auto& r : reports) {
    const double limit = r.label.rfind("round trip", 0) == 0 ? 1e-28 : 1e-25;
    EXPECT_LT(r.rel_residual.to_double(), limit) << r.label;
  }
}

TEST(PIVState, CoordinatesFromCentreAndHalfWidth) {
  const PrecisionContext ctx(256);
  PrecisionScope scope(256);
  const auto st = strict_state(4, ctx);
  EXPECT_TRUE(st.x == (kStrict.s1 + kStrict.s2) / 2);
  EXPECT_TRUE(st.s == (kStrict.s2 - kStrict.s1) / 2);
  EXPECT_EQ(st.n, 4);
}

TEST(PIVState, HamiltonianMatchesLogDerivative) {
  const PrecisionContext ctx(512);
  PrecisionScope scope(512);
  const int n = 6;
  const auto sys = build_ortho_system(kStrict, n, ctx);
  const auto st = to_piv_state(aux_quantities(n, sys, ctx), sys, n);
  const Real h = piv_hamiltonian(st.a1, st.a2, st.b1, st.b2, st.x, st.s, n);
  EXPECT_TRUE(h == st.H);
  const Real expected = sigma_n(sys, n, SigmaRoute::two_p, ctx) + n * (sys.params.s1 + sys.params.s2);
  EXPECT_LT(rel_diff(h, expected), 1e-25);
}

TEST(PIVState, GaussianIsDegenerate) {
  const PrecisionContext ctx(256);
  PrecisionScope scope(256);
  const auto w = WeightParams::make(1, 0, 0, -1, 1, false);
  const auto sys = build_ortho_system(w, 4, ctx);
  EXPECT_THROW(to_piv_state(aux_quantities(3, sys, ctx), sys, 3), DegenerateResidue);
  EXPECT_THROW(check_hamilton_equations(w, 3, ctx), DegenerateResidue);
}

TEST(HamiltonEquations, StrictParams) {
  const PrecisionContext ctx(512);
  const auto reports = check_hamilton_equations(kStrict, 6, ctx, num("1e-10", 512));
  ASSERT_EQ(reports.size(), 4u);
  for (const auto& r : reports) EXPECT_LT(r.rel_residual.to_double(), 1e-15) << r.label;
}

TEST(HamiltonEquations, ResidualShrinksWithStep) {
  const PrecisionContext ctx(512);
  const auto coarse = check_hamilton_equations(kStrict, 6, ctx, num("1e-3", 512));
  const auto fine = check_hamilton_equations(kStrict, 6, ctx, num("5e-4", 512));
  for (int k = 0; k < 4; ++k) {
    const double order = std::log2(coarse[k].abs_residual.to_double() / fine[k].abs_residual.to_double());
    EXPECT_GE(order, 1.8) << coarse[k].label;
  }
}

TEST(HamiltonEquations, RhsIsCanonicalGradient) {
  const PrecisionContext ctx(512);
  PrecisionScope scope(512);
  const auto st = strict_state(6, ctx);
  const auto rhs = piv_rhs(st);
  // H is quadratic in each coordinate separately, so the central difference
  // is exact up to rounding.
  const Real h = num("1e-30", 512);
  auto H = [&](Real a1, Real a2, Real b1, Real b2) { return piv_hamiltonian(a1, a2, b1, b2, st.x, st.s, st.n); };
  const Real dH_db1 = (H(st.a1, st.a2, st.b1 + h, st.b2) - H(st.a1, st.a2, st.b1 - h, st.b2)) / (2 * h);
  const Real dH_db2 = (H(st.a1, st.a2, st.b1, st.b2 + h) - H(st.a1, st.a2, st.b1, st.b2 - h)) / (2 * h);
  const Real dH_da1 = (H(st.a1 + h, st.a2, st.b1, st.b2) - H(st.a1 - h, st.a2, st.b1, st.b2)) / (2 * h);
  const Real dH_da2 = (H(st.a1, st.a2 + h, st.b1, st.b2) - H(st.a1, st.a2 - h, st.b1, st.b2)) / (2 * h);
  EXPECT_LT(rel_diff(rhs[0], dH_db1), 1e-25);
  EXPECT_LT(rel_diff(rhs[1], dH_db2), 1e-25);
  EXPECT_LT(rel_diff(rhs[2], -dH_da1), 1e-25);
  EXPECT_LT(rel_diff(rhs[3], -dH_da2), 1e-25);
}

TEST(RecurrenceMaps, StrictParams) {
  const PrecisionContext ctx(512);
  const auto reports = check_recurrence_maps(kStrict, 6, ctx);
  ASSERT_GE(reports.size(), 3u);
  for (const auto& r : reports) EXPECT_LT(r.rel_residual.to_double(), 1e-18) << r.label;
}

TEST(RecurrenceMaps, BetaMapIsSubstitution) {
  const PrecisionContext ctx(512);
  PrecisionScope scope(512);
  const int n = 6;
  const auto sys = build_ortho_system(kStrict, n, ctx);
  const auto aux = aux_quantities(n, sys, ctx);
  const auto st = to_piv_state(aux, sys, n);
  const Real via_ab = (st.a1 * st.b1 + st.a2 * st.b2 + n) / 2;
  EXPECT_LT(rel_diff(via_ab, (aux.r1 + aux.r2 + n) / 2), 1e-140);
  const auto prev = aux_quantities(n - 1, sys, ctx);
  EXPECT_LT(rel_diff(st.a1 + st.a2, (prev.R1 + prev.R2) / 2), 1e-25);
}

TEST(RoundTrip, InverseMapOverDegrees) {
  const PrecisionContext ctx(512);
  PrecisionScope scope(512);
  const auto sys = build_ortho_system(kStrict, 12, ctx);
  for (int n = 1; n <= 12; ++n) {
    const auto aux = aux_quantities(n, sys, ctx);
    const auto back = from_piv_state(to_piv_state(aux, sys, n));
    EXPECT_LT(rel_diff(back.R1, aux.R1), 1e-28) << n;
    EXPECT_LT(rel_diff(back.R2, aux.R2), 1e-28) << n;
    EXPECT_LT(rel_diff(back.r1, aux.r1), 1e-28) << n;
    EXPECT_LT(rel_diff(back.r2, aux.r2), 1e-28) << n;
  }
}
