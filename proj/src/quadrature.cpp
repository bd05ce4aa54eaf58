#include "jgl/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "jgl/errors.hpp"

namespace jgl {

GaussLegendreRule gauss_legendre(int m, const PrecisionContext& ctx) {
  if (m < 1) throw std::invalid_argument("gauss_legendre: m must be positive");
  const Precision p{ctx.bits() + 16};
  const Real eps = pow2(-(ctx.bits() + 8), p);
  GaussLegendreRule rule;
  rule.nodes.resize(m, Real(p));
  rule.weights.resize(m, Real(p));

  Real p0(p), p1(p), p2(p), dp(p), dx(p), tmp(p);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    Real x(std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5)), p);
    for (int iter = 0; iter < 200; ++iter) {
      // Legendre recurrence: (k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1}.
      mpfr_set_ui(p0.get(), 1, MPFR_RNDN);
      mpfr_set(p1.get(), x.get(), MPFR_RNDN);
      for (int k = 1; k < m; ++k) {
        mpfr_mul(tmp.get(), x.get(), p1.get(), MPFR_RNDN);
        mpfr_mul_si(tmp.get(), tmp.get(), 2 * k + 1, MPFR_RNDN);
        mpfr_mul_si(p2.get(), p0.get(), k, MPFR_RNDN);
        mpfr_sub(p2.get(), tmp.get(), p2.get(), MPFR_RNDN);
        mpfr_div_si(p2.get(), p2.get(), k + 1, MPFR_RNDN);
        mpfr_swap(p0.get(), p1.get());
        mpfr_swap(p1.get(), p2.get());
      }
      if (m == 1) {
        mpfr_set_ui(p0.get(), 1, MPFR_RNDN);
      }
      // P_m'(x) = m (x P_m - P_{m-1}) / (x^2 - 1)
      dp = m * (x * p1 - p0) / (square(x) - 1);
      dx = p1 / dp;
      x -= dx;
      if (abs(dx) < eps) break;
    }
    // Recompute the derivative at the converged node for the weight.
    mpfr_set_ui(p0.get(), 1, MPFR_RNDN);
    mpfr_set(p1.get(), x.get(), MPFR_RNDN);
    for (int k = 1; k < m; ++k) {
      p2 = ((2 * k + 1) * x * p1 - k * p0) / (k + 1);
      p0 = p1;
      p1 = p2;
    }
    if (m == 1) mpfr_set_ui(p0.get(), 1, MPFR_RNDN);
    dp = m * (x * p1 - p0) / (square(x) - 1);
    Real w = 2 / ((1 - square(x)) * square(dp));
    rule.nodes[i] = x;
    rule.weights[i] = w;
    rule.nodes[m - 1 - i] = -x;
    rule.weights[m - 1 - i] = w;
  }
  if (m % 2 == 1) rule.nodes[m / 2] = Real(0.0, p);
  return rule;
}

Real integrate_panels(const UnivariateFn& f, const Real& a, const Real& b, int panels,
                      const GaussLegendreRule& rule) {
  const Precision p{std::max(a.precision(), rule.nodes.front().precision())};
  const Real width = (b - a) / panels;
  const Real half = width / 2;
  Real total(p);
  for (int k = 0; k < panels; ++k) {
    const Real mid = a + (k + 0.5) * width;
    Real panel(p);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      panel += rule.weights[i] * f(mid + half * rule.nodes[i]);
    }
    total += panel * half;
  }
  return total;
}

Real integrate(const UnivariateFn& f, const Real& a, const Real& b, const PrecisionContext& ctx,
               int nodes_per_panel, int max_levels) {
  const auto rule = gauss_legendre(nodes_per_panel, ctx);
  const Real tol = pow2(-(ctx.bits() - 16), ctx.precision());
  int panels = std::max(1, static_cast<int>(std::ceil(abs(b - a).to_double())));
  Real previous = integrate_panels(f, a, b, panels, rule);
  for (int level = 0; level < max_levels; ++level) {
    panels *= 2;
    Real current = integrate_panels(f, a, b, panels, rule);
    const Real diff = abs(current - previous);
    if (diff.is_zero() || diff <= tol * abs(current)) return Real(current, ctx.precision());
    previous = std::move(current);
  }
  throw QuadratureNotConverged("composite Gauss-Legendre did not settle after " + std::to_string(max_levels) +
                               " panel doublings");
}

}  // namespace jgl
