#include "jgl/numerics.hpp"

#include <cmath>

#include "jgl/errors.hpp"

namespace jgl {

namespace {

// erf(x) = (2/sqrt(pi)) e^{-x^2} sum_k 2^k x^{2k+1} / (2k+1)!!, all terms
// positive. erfc = 1 - erf cancels about x^2 / ln 2 bits, which are added to
// the working precision up front.
Real erfc_series(const Real& x, long wp) {
  const double xd = x.to_double();
  const long extra = static_cast<long>(std::ceil(1.4427 * xd * xd + std::log2(1.0 + xd))) + 8;
  const Precision p{wp + extra};
  const Real xx(x, p);
  const Real two_x2 = 2 * square(xx);
  Real term(xx, p);
  Real sum(xx, p);
  Real eps = pow2(-(wp + extra + 4), p);
  for (long k = 0;; ++k) {
    mpfr_mul(term.get(), term.get(), two_x2.get(), MPFR_RNDN);
    mpfr_div_si(term.get(), term.get(), 2 * k + 3, MPFR_RNDN);
    sum += term;
    if (abs(term) < sum * eps) break;
  }
  Real erf_x = 2 * sum * exp(-square(xx)) / sqrt(pi(p));
  return Real(1.0, p) - erf_x;
}

// Even contraction of the Laplace continued fraction:
// sqrt(pi) e^{x^2} erfc(x) = 2x / (2x^2+1 - 1*2/(2x^2+5 - 3*4/(2x^2+9 - ...))),
// evaluated by the modified Lentz algorithm.
Real erfc_cf(const Real& x, long wp) {
  const Precision p{wp + 16};
  const Real xx(x, p);
  const Real two_x2 = 2 * square(xx);
  const Real tiny = pow2(-(wp + 200), p);
  const Real eps = pow2(-(wp + 4), p);
  Real b = two_x2 + 1;
  Real f = b;
  Real c = b;
  Real d(0.0, p);
  Real delta(p);
  Real a(p);
  for (long k = 1;; ++k) {
    mpfr_set_si(a.get(), -(2 * k - 1) * (2 * k), MPFR_RNDN);
    b += 4;
    // d = 1 / (b + a d)
    mpfr_mul(d.get(), d.get(), a.get(), MPFR_RNDN);
    mpfr_add(d.get(), d.get(), b.get(), MPFR_RNDN);
    if (d.is_zero()) d = tiny;
    mpfr_ui_div(d.get(), 1, d.get(), MPFR_RNDN);
    // c = b + a / c
    mpfr_div(c.get(), a.get(), c.get(), MPFR_RNDN);
    mpfr_add(c.get(), c.get(), b.get(), MPFR_RNDN);
    if (c.is_zero()) c = tiny;
    mpfr_mul(delta.get(), c.get(), d.get(), MPFR_RNDN);
    f *= delta;
    mpfr_sub_ui(delta.get(), delta.get(), 1, MPFR_RNDN);
    if (abs(delta) < eps) break;
  }
  return 2 * xx * exp(-square(xx)) / (sqrt(pi(p)) * f);
}

// The continued fraction needs roughly (wp ln 2)^2 / (8 x^2) steps, the
// series about 2x^2 + wp ln2 / ln(...) steps at a wider precision. Pick the
// cheaper one; below x = 1.5 the series always wins.
bool use_continued_fraction(const Real& x, long wp) {
  const double xd = x.to_double();
  if (xd <= 1.5) return false;
  const double cf_steps = std::pow(wp * 0.6931, 2) / (8.0 * xd * xd);
  const double series_steps = 2.0 * xd * xd + wp * 0.6931;
  // A Lentz step costs about three times a series step (two divisions).
  return 3.0 * cf_steps < series_steps * (1.0 + 1.4427 * xd * xd / wp);
}

Real erfc_positive(const Real& x, long wp) {
  return use_continued_fraction(x, wp) ? erfc_cf(x, wp) : erfc_series(x, wp);
}

}  // namespace

Real eval_erfc(const Real& x, const PrecisionContext& ctx) {
  const long wp = ctx.bits() + kGuardBits;
  const Precision out{ctx.bits()};
  if (x.is_zero()) return Real(1.0, out);
  if (x < 0) {
    return Real(2 - erfc_positive(-x, wp), out);
  }
  return Real(erfc_positive(x, wp), out);
}

Real default_fd_step(const Point2& point, const PrecisionContext& ctx) {
  const Precision p = ctx.precision();
  Real scale = max(Real(1.0, p), max(abs(point.s1), abs(point.s2)));
  return pow2(-ctx.bits() / 4, p) * scale;
}

FdEstimate richardson(Real coarse, Real fine, Real step) {
  Real value = (4 * fine - coarse) / 3;
  Real error = abs(value - fine);
  return FdEstimate{std::move(value), std::move(error), std::move(coarse), std::move(fine), std::move(step)};
}

std::vector<FdEstimate> directional_diff(const BivariateVecFn& f, const Point2& point,
                                         const Point2& direction, std::optional<Real> step,
                                         int order, const PrecisionContext& ctx) {
  if (order != 1 && order != 2) throw std::invalid_argument("directional_diff: order must be 1 or 2");
  const Precision p = ctx.precision();
  const Real h = step ? Real(*step, p) : default_fd_step(point, ctx);
  if (!(h > 0)) throw std::invalid_argument("directional_diff: step must be positive");
  if (h < pow2(-ctx.bits() / 2, p)) {
    throw StepUnderflow("step " + h.to_string(6) + " below 2^{-bits/2} at " + std::to_string(ctx.bits()) +
                        " bits");
  }
  auto at = [&](const Real& t) {
    return f(point.s1 + t * direction.s1, point.s2 + t * direction.s2);
  };
  const Real half = h / 2;
  const auto fp = at(h);
  const auto fm = at(-h);
  const auto fp2 = at(half);
  const auto fm2 = at(-half);
  std::vector<Real> f0;
  if (order == 2) f0 = at(Real(0.0, p));

  std::vector<FdEstimate> out;
  out.reserve(fp.size());
  for (std::size_t i = 0; i < fp.size(); ++i) {
    Real coarse(p);
    Real fine(p);
    if (order == 1) {
      coarse = (fp[i] - fm[i]) / (2 * h);
      fine = (fp2[i] - fm2[i]) / h;
    } else {
      coarse = (fp[i] - 2 * f0[i] + fm[i]) / square(h);
      fine = (fp2[i] - 2 * f0[i] + fm2[i]) / square(half);
    }
    out.push_back(richardson(std::move(coarse), std::move(fine), h));
  }
  return out;
}

FdEstimate directional_diff(const BivariateFn& f, const Point2& point, const Point2& direction,
                            std::optional<Real> step, int order, const PrecisionContext& ctx) {
  auto vec = [&](const Real& s1, const Real& s2) { return std::vector<Real>{f(s1, s2)}; };
  return std::move(directional_diff(BivariateVecFn(vec), point, direction, std::move(step), order, ctx).front());
}

}  // namespace jgl
