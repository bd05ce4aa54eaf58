#include "jgl/weight.hpp"

#include "jgl/errors.hpp"
#include "jgl/numerics.hpp"

namespace jgl {

namespace {

// T_k(s) = int_s^inf x^k e^{-x^2} dx for s >= 0, k = 0..k_max. The forward
// recurrence T_k = s^{k-1} e^{-s^2}/2 + (k-1)/2 T_{k-2} only adds positive
// terms here, so it is stable.
std::vector<Real> tail_moments(const Real& s, int k_max, const PrecisionContext& wctx) {
  const Precision p = wctx.precision();
  std::vector<Real> t(static_cast<std::size_t>(k_max) + 1, Real(p));
  const Real ss(s, p);
  const Real half_gauss = exp(-square(ss)) / 2;
  t[0] = sqrt(pi(p)) / 2 * eval_erfc(ss, wctx);
  if (k_max >= 1) t[1] = half_gauss;
  Real power(1.0, p);  // s^{k-1}
  for (int k = 2; k <= k_max; ++k) {
    power *= ss;
    t[k] = power * half_gauss + t[k - 2] * (k - 1) / 2;
  }
  return t;
}

std::vector<Real> gaussian_moments(int k_max, Precision p) {
  std::vector<Real> g(static_cast<std::size_t>(k_max) + 1, Real(p));
  if (k_max >= 0) g[0] = sqrt(pi(p));
  for (int k = 2; k <= k_max; k += 2) g[k] = g[k - 2] * (k - 1) / 2;
  return g;
}

// int_{-inf}^{s} x^k e^{-x^2} dx and int_s^{inf} x^k e^{-x^2} dx, evaluated
// from tails at |s| so that neither side suffers cancellation beyond what the
// integral itself implies.
struct SplitMoments {
  std::vector<Real> below;
  std::vector<Real> above;
};

SplitMoments split_moments(const Real& s, int k_max, const std::vector<Real>& gauss,
                           const PrecisionContext& wctx) {
  const Precision p = wctx.precision();
  SplitMoments out;
  const bool nonneg = s >= 0;
  const auto tail = tail_moments(nonneg ? s : -s, k_max, wctx);
  out.below.resize(tail.size(), Real(p));
  out.above.resize(tail.size(), Real(p));
  for (int k = 0; k <= k_max; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    if (nonneg) {
      out.above[kk] = tail[kk];
      out.below[kk] = gauss[kk] - tail[kk];
    } else {
      out.below[kk] = (k % 2 == 0) ? tail[kk] : -tail[kk];
      out.above[kk] = gauss[kk] - out.below[kk];
    }
  }
  return out;
}

}  // namespace

WeightParams WeightParams::make(double A, double B1, double B2, double s1, double s2, bool strict) {
  return WeightParams{Real(A), Real(B1), Real(B2), Real(s1), Real(s2), strict};
}

void WeightParams::validate() const {
  for (const Real* v : {&A, &B1, &B2, &s1, &s2}) {
    if (!v->is_finite()) throw InvalidParams("weight parameters must be finite");
  }
  if (strict) {
    if (!(s1 < s2)) throw InvalidParams("s1 < s2 required");
    if (B1.is_zero() || B2.is_zero()) throw InvalidParams("strict mode requires B1 * B2 != 0");
  }
  const bool ordered = s1 <= s2;
  const Real& b_lo = ordered ? B1 : B2;
  const Real& b_hi = ordered ? B2 : B1;
  const Real c1 = A + b_lo;
  const Real c2 = c1 + b_hi;
  if (A < 0 || c1 < 0 || c2 < 0) {
    throw InvalidParams("weight must be nonnegative: need A >= 0, A + B1 >= 0, A + B1 + B2 >= 0");
  }
  if (A.is_zero() && c2.is_zero() && (c1.is_zero() || s1 == s2)) {
    throw InvalidParams("weight vanishes identically");
  }
}

WeightParams WeightParams::with_endpoints(Real new_s1, Real new_s2) const {
  WeightParams out = *this;
  out.s1 = std::move(new_s1);
  out.s2 = std::move(new_s2);
  return out;
}

WeightParams WeightParams::mirrored() const {
  // w(-x) = (A+B1+B2) - B2 theta(x + s2) - B1 theta(x + s1) almost everywhere.
  return WeightParams{A + B1 + B2, -B2, -B1, -s2, -s1, strict};
}

WeightParams WeightParams::swapped() const { return WeightParams{A, B2, B1, s2, s1, false}; }

Real incomplete_moment(int k, const Real& s, const PrecisionContext& ctx) {
  if (k < 0) throw std::invalid_argument("incomplete_moment: k must be nonnegative");
  const auto wctx = ctx.with_bits(ctx.bits() + kGuardBits);
  const auto gauss = gaussian_moments(k, wctx.precision());
  const auto split = split_moments(s, k, gauss, wctx);
  return Real(split.above[static_cast<std::size_t>(k)], ctx.precision());
}

Real gaussian_moment(int k, const PrecisionContext& ctx) {
  if (k < 0) throw std::invalid_argument("gaussian_moment: k must be nonnegative");
  const auto g = gaussian_moments(k, Precision{ctx.bits() + kGuardBits});
  return Real(g[static_cast<std::size_t>(k)], ctx.precision());
}

MomentTable moment_table(const WeightParams& params, int k_max, const PrecisionContext& ctx) {
  params.validate();
  if (k_max < 0) throw std::invalid_argument("moment_table: k_max must be nonnegative");
  const auto wctx = ctx.with_bits(ctx.bits() + kGuardBits);
  const Precision p = wctx.precision();
  const auto gauss = gaussian_moments(k_max, p);

  // Regroup the weight by interval: c0 on (-inf, lo), c1 on (lo, hi),
  // c2 on (hi, inf). Labels are sorted first so that exchanging them gives
  // bitwise identical moments.
  const bool ordered = params.s1 <= params.s2;
  const Real& lo = ordered ? params.s1 : params.s2;
  const Real& hi = ordered ? params.s2 : params.s1;
  const Real c0(params.A, p);
  const Real c1 = c0 + (ordered ? params.B1 : params.B2);
  const Real c2 = c1 + (ordered ? params.B2 : params.B1);

  const auto at_lo = split_moments(lo, k_max, gauss, wctx);
  const auto at_hi = split_moments(hi, k_max, gauss, wctx);
  const bool lo_nonneg = lo >= 0;
  const bool hi_nonpos = hi <= 0;

  MomentTable table{params, k_max, {}};
  table.moments.reserve(static_cast<std::size_t>(k_max) + 1);
  for (int k = 0; k <= k_max; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    Real middle(p);
    if (lo_nonneg) {
      middle = at_lo.above[kk] - at_hi.above[kk];
    } else if (hi_nonpos) {
      middle = at_hi.below[kk] - at_lo.below[kk];
    } else {
      middle = gauss[kk] - at_lo.below[kk] - at_hi.above[kk];
    }
    Real m(p);
    if (!c0.is_zero()) m += c0 * at_lo.below[kk];
    if (!c1.is_zero()) m += c1 * middle;
    if (!c2.is_zero()) m += c2 * at_hi.above[kk];
    table.moments.emplace_back(m, ctx.precision());
  }
  return table;
}

Real moment(int k, const WeightParams& params, const PrecisionContext& ctx) {
  return std::move(moment_table(params, k, ctx).moments.back());
}

Real partition_constant(int n, const PrecisionContext& ctx) {
  if (n < 1) throw std::invalid_argument("partition_constant: n must be positive");
  const Precision p{ctx.bits() + kGuardBits};
  Real product(1.0, p);
  Real factorial(1.0, p);
  for (int k = 1; k <= n - 1; ++k) {
    factorial *= k;
    product *= factorial;
  }
  const Real two_pi = 2 * pi(p);
  Real c = pow(two_pi, Real(n, p) / 2) * product;
  // 2^{-n^2/2}: exact for even n^2, one square root otherwise.
  const long nn = static_cast<long>(n) * n;
  c = ldexp(c, -(nn / 2));
  if (nn % 2 != 0) c /= sqrt(Real(2.0, p));
  return Real(c, ctx.precision());
}

}  // namespace jgl
