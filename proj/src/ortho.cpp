#include "jgl/ortho.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "jgl/errors.hpp"
#include "jgl/quadrature.hpp"

namespace jgl {

namespace {

void fill_derived(OrthoSystem& sys) {
  const Precision p{sys.bits};
  const auto n_max = static_cast<std::size_t>(sys.n_max);
  sys.beta.assign(n_max + 1, Real(p));
  for (std::size_t n = 1; n <= n_max; ++n) sys.beta[n] = sys.h[n] / sys.h[n - 1];
  sys.logD.assign(n_max + 2, Real(p));
  for (std::size_t k = 1; k <= n_max + 1; ++k) sys.logD[k] = sys.logD[k - 1] + log(sys.h[k - 1]);
}

// Unit-lower-triangular / diagonal factorization H = L D L^T of the
// (n_max+2) x (n_max+2) moment matrix. Rows of L^{-1} are the monic
// orthogonal polynomials, so D holds the norms h_n and the subleading
// coefficient is p(n) = (L^{-1})_{n,n-1} = -L_{n,n-1}.
OrthoSystem factorize(const WeightParams& params, int n_max, const PrecisionContext& ctx) {
  const int size = n_max + 2;
  const auto table = moment_table(params, 2 * size - 2, ctx);
  const Precision p = ctx.precision();
  const auto& m = table.moments;

  // lower[i][k] = L_ik and scaled[i][k] = L_ik D_k for k < i.
  std::vector<std::vector<Real>> lower(static_cast<std::size_t>(size));
  std::vector<std::vector<Real>> scaled(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) {
    lower[i].assign(static_cast<std::size_t>(i), Real(p));
    scaled[i].assign(static_cast<std::size_t>(i), Real(p));
  }

  OrthoSystem sys;
  sys.params = params;
  sys.n_max = n_max;
  sys.bits = ctx.bits();
  sys.h.assign(static_cast<std::size_t>(size), Real(p));
  sys.p.assign(static_cast<std::size_t>(size), Real(p));

  Real acc(p);
  for (int j = 0; j < size; ++j) {
    for (int i = j; i < size; ++i) {
      mpfr_set_zero(acc.get(), 1);
      const auto& li = lower[i];
      const auto& wj = scaled[j];
      for (int k = 0; k < j; ++k) mpfr_fma(acc.get(), li[k].get(), wj[k].get(), acc.get(), MPFR_RNDN);
      mpfr_sub(acc.get(), m[i + j].get(), acc.get(), MPFR_RNDN);
      if (i == j) {
        if (!(acc > 0)) {
          throw NotPositiveDefinite("pivot " + std::to_string(j) + " = " + acc.to_string(8) + " at " +
                                    std::to_string(ctx.bits()) + " bits");
        }
        sys.h[j] = acc;
      } else {
        mpfr_set(scaled[i][j].get(), acc.get(), MPFR_RNDN);
        mpfr_div(lower[i][j].get(), acc.get(), sys.h[j].get(), MPFR_RNDN);
      }
    }
  }
  for (int n = 1; n < size; ++n) sys.p[n] = -lower[n][n - 1];

  sys.alpha.assign(static_cast<std::size_t>(n_max) + 1, Real(p));
  for (int n = 0; n <= n_max; ++n) sys.alpha[n] = sys.p[n] - sys.p[n + 1];
  fill_derived(sys);
  return sys;
}

bool agrees(const OrthoSystem& a, const OrthoSystem& b, double tol) {
  const auto n = static_cast<std::size_t>(a.n_max);
  const Real rel_h = abs(a.h[n] - b.h[n]) / abs(b.h[n]);
  const Real scale = max(abs(b.alpha[n]), sqrt(b.h[n + 1] / b.h[n]));
  const Real rel_alpha = abs(a.alpha[n] - b.alpha[n]) / scale;
  const Real rel_p = abs(a.p[n + 1] - b.p[n + 1]) / max(Real(1.0), abs(b.p[n + 1]));
  return rel_h < tol && rel_alpha < tol && rel_p < tol;
}

}  // namespace

long default_bits(int n_max) { return 64 + 12L * n_max; }

OrthoSystem build_ortho_system(const WeightParams& params, int n_max, const PrecisionContext& ctx,
                               const BuildOptions& options) {
  if (n_max < 0) throw std::invalid_argument("build_ortho_system: n_max must be nonnegative");
  OrthoSystem sys = factorize(params, n_max, ctx);
  if (options.verify_precision) {
    const OrthoSystem check = factorize(params, n_max, ctx.doubled());
    if (!agrees(sys, check, ctx.agree_tol())) {
      char tol[32];
      std::snprintf(tol, sizeof tol, "%g", ctx.agree_tol());
      throw PrecisionExhausted("h_" + std::to_string(n_max) + " changes beyond " + tol + " between " +
                               std::to_string(ctx.bits()) +
                               " and " + std::to_string(2 * ctx.bits()) + " bits");
    }
  }
  return sys;
}

OrthoSystem build_ortho_system_auto(const WeightParams& params, int n_max, const PrecisionContext& ctx,
                                    long max_bits) {
  long bits = std::max(ctx.bits(), default_bits(n_max));
  while (true) {
    try {
      return build_ortho_system(params, n_max, ctx.with_bits(bits));
    } catch (const Error& e) {
      if (dynamic_cast<const PrecisionExhausted*>(&e) == nullptr &&
          dynamic_cast<const NotPositiveDefinite*>(&e) == nullptr) {
        throw;
      }
      if (2 * bits > max_bits) {
        throw PrecisionExhausted("no agreement up to " + std::to_string(max_bits) + " bits: " + e.what());
      }
      bits *= 2;
    }
  }
}

OrthoSystem stieltjes_oracle(const WeightParams& params, int n_max, const PrecisionContext& ctx) {
  params.validate();
  if (n_max < 0) throw std::invalid_argument("stieltjes_oracle: n_max must be nonnegative");
  const auto wctx = ctx.with_bits(ctx.bits() + 16);
  const Precision p = wctx.precision();
  const int top = n_max + 1;  // highest degree whose norm is needed

  // Truncation point: int_L^inf x^{2 top + 1} e^{-x^2} < 2^{-bits}.
  double cut = 5.0;
  for (int it = 0; it < 50; ++it) {
    cut = std::sqrt(ctx.bits() * std::log(2.0) + 10.0 + (2.0 * top + 2.0) * std::log(cut));
  }
  const Real L(std::ceil(cut), p);

  const bool ordered = params.s1 <= params.s2;
  const Real lo(ordered ? params.s1 : params.s2, p);
  const Real hi(ordered ? params.s2 : params.s1, p);
  const Real c0(params.A, p);
  const Real c1 = c0 + (ordered ? params.B1 : params.B2);
  const Real c2 = c1 + (ordered ? params.B2 : params.B1);
  struct Piece {
    Real a, b, c;
  };
  std::vector<Piece> pieces;
  auto add_piece = [&](Real a, Real b, const Real& c) {
    a = max(a, -L);
    b = min(b, L);
    if (a < b && !c.is_zero()) pieces.push_back({std::move(a), std::move(b), c});
  };
  add_piece(-L, lo, c0);
  add_piece(lo, hi, c1);
  add_piece(hi, L, c2);

  const auto rule = gauss_legendre(40, wctx);
  const Real tol = pow2(-(ctx.bits() - 32), p);

  auto run = [&](double panel_width) {
    std::vector<Real> x;
    std::vector<Real> w;
    for (const auto& piece : pieces) {
      const int panels = std::max(1, static_cast<int>(std::ceil((piece.b - piece.a).to_double() / panel_width)));
      const Real width = (piece.b - piece.a) / panels;
      const Real half = width / 2;
      for (int k = 0; k < panels; ++k) {
        const Real mid = piece.a + (k + 0.5) * width;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
          Real node = mid + half * rule.nodes[i];
          w.push_back(piece.c * half * rule.weights[i] * exp(-square(node)));
          x.push_back(std::move(node));
        }
      }
    }
    OrthoSystem sys;
    sys.params = params;
    sys.n_max = n_max;
    sys.bits = ctx.bits();
    sys.h.assign(static_cast<std::size_t>(top) + 1, Real(p));
    sys.alpha.assign(static_cast<std::size_t>(n_max) + 1, Real(p));
    std::vector<Real> prev(x.size(), Real(0.0, p));
    std::vector<Real> cur(x.size(), Real(1.0, p));
    Real norm(p), first(p), tmp(p);
    for (int n = 0; n <= top; ++n) {
      mpfr_set_zero(norm.get(), 1);
      mpfr_set_zero(first.get(), 1);
      for (std::size_t k = 0; k < x.size(); ++k) {
        mpfr_sqr(tmp.get(), cur[k].get(), MPFR_RNDN);
        mpfr_mul(tmp.get(), tmp.get(), w[k].get(), MPFR_RNDN);
        mpfr_add(norm.get(), norm.get(), tmp.get(), MPFR_RNDN);
        mpfr_fma(first.get(), tmp.get(), x[k].get(), first.get(), MPFR_RNDN);
      }
      sys.h[n] = norm;
      if (n == top) break;
      sys.alpha[n] = first / norm;
      const Real beta = n > 0 ? norm / sys.h[n - 1] : Real(0.0, p);
      for (std::size_t k = 0; k < x.size(); ++k) {
        // next = (x - alpha) cur - beta prev, stored into prev.
        mpfr_mul(prev[k].get(), prev[k].get(), beta.get(), MPFR_RNDN);
        mpfr_sub(tmp.get(), x[k].get(), sys.alpha[n].get(), MPFR_RNDN);
        mpfr_fms(prev[k].get(), tmp.get(), cur[k].get(), prev[k].get(), MPFR_RNDN);
        mpfr_swap(prev[k].get(), cur[k].get());
      }
    }
    return sys;
  };

  double width = 1.0;
  OrthoSystem previous = run(width);
  for (int level = 0; level < 8; ++level) {
    width /= 2;
    OrthoSystem current = run(width);
    bool settled = true;
    for (int n = 0; n <= top && settled; ++n) {
      settled = abs(current.h[n] - previous.h[n]) <= tol * abs(current.h[n]);
    }
    for (int n = 0; n <= n_max && settled; ++n) {
      const Real scale = max(Real(1.0, p), abs(current.alpha[n]));
      settled = abs(current.alpha[n] - previous.alpha[n]) <= tol * scale;
    }
    if (settled) {
      OrthoSystem out;
      out.params = params;
      out.n_max = n_max;
      out.bits = ctx.bits();
      const Precision outp = ctx.precision();
      for (const auto& v : current.h) out.h.emplace_back(v, outp);
      for (const auto& v : current.alpha) out.alpha.emplace_back(v, outp);
      out.p.assign(static_cast<std::size_t>(top) + 1, Real(outp));
      for (int n = 1; n <= top; ++n) out.p[n] = out.p[n - 1] - out.alpha[n - 1];
      fill_derived(out);
      return out;
    }
    previous = std::move(current);
  }
  throw QuadratureNotConverged("Stieltjes panels did not settle");
}

MonicPair eval_monic_pair(int n, const Real& x, const OrthoSystem& sys) {
  if (n < 0 || n > sys.n_max + 1) throw std::out_of_range("eval_monic: degree outside the system");
  const Precision p{sys.bits};
  Real prev(0.0, p);
  Real cur(1.0, p);
  const Real xx(x, p);
  Real tmp(p);
  for (int j = 0; j < n; ++j) {
    mpfr_mul(prev.get(), prev.get(), sys.beta[j].get(), MPFR_RNDN);
    mpfr_sub(tmp.get(), xx.get(), sys.alpha[j].get(), MPFR_RNDN);
    mpfr_fms(prev.get(), tmp.get(), cur.get(), prev.get(), MPFR_RNDN);
    mpfr_swap(prev.get(), cur.get());
  }
  return MonicPair{std::move(cur), std::move(prev)};
}

Real eval_monic(int n, const Real& x, const OrthoSystem& sys) { return eval_monic_pair(n, x, sys).Pn; }

AuxQuantities aux_quantities(int n, const OrthoSystem& sys, const PrecisionContext& ctx) {
  if (n < 0 || n > sys.n_max) throw std::out_of_range("aux_quantities: n outside [0, n_max]");
  const Precision p{std::max(sys.bits, ctx.bits())};
  const auto& w = sys.params;
  AuxQuantities aux;
  aux.n = n;
  aux.s1 = Real(w.s1, p);
  aux.s2 = Real(w.s2, p);
  auto one = [&](const Real& s, const Real& B, Real& R, Real& r, Real& pn, Real& pnm1) {
    auto pair = eval_monic_pair(n, s, sys);
    pn = std::move(pair.Pn);
    pnm1 = std::move(pair.Pnm1);
    const Real g = B * exp(-square(s));
    R = g * square(pn) / sys.h[n];
    r = n == 0 ? Real(0.0, p) : g * pn * pnm1 / sys.h[n - 1];
  };
  one(aux.s1, w.B1, aux.R1, aux.r1, aux.Pn_at_s1, aux.Pnm1_at_s1);
  one(aux.s2, w.B2, aux.R2, aux.r2, aux.Pn_at_s2, aux.Pnm1_at_s2);
  return aux;
}

LadderCoeffs ladder_eval(int n, const Real& z, const AuxQuantities& aux) {
  if (n != aux.n) throw std::invalid_argument("ladder_eval: degree does not match residues");
  if (z == aux.s1 || z == aux.s2) throw PoleHit("z = " + z.to_string(20) + " is a jump location");
  const Real d1 = z - aux.s1;
  const Real d2 = z - aux.s2;
  return LadderCoeffs{z, aux.R1 / d1 + aux.R2 / d2 + 2, aux.r1 / d1 + aux.r2 / d2};
}

bool residue_degenerate(const Real& R, const Real& r, const Real& B, long bits) {
  if (B.is_zero()) return false;
  if (R.is_zero()) return true;
  return abs(R) < ldexp(abs(r), -bits / 2);
}

Real sigma_n(const OrthoSystem& sys, int n, SigmaRoute route, const PrecisionContext& ctx) {
  if (n < 0 || n > sys.n_max) throw std::out_of_range("sigma_n: n outside [0, n_max]");
  const Precision p{std::max(sys.bits, ctx.bits())};
  switch (route) {
    case SigmaRoute::two_p:
      return Real(2 * sys.p[n], p);
    case SigmaRoute::sum_R: {
      Real sum(p);
      for (int j = 0; j < n; ++j) {
        const auto aux = aux_quantities(j, sys, ctx);
        sum += aux.R1 + aux.R2;
      }
      return -sum;
    }
    case SigmaRoute::closed_form: {
      const auto aux = aux_quantities(n, sys, ctx);
      const auto& w = sys.params;
      auto ratio = [&](const Real& r, const Real& R, const Real& B, int i) {
        if (B.is_zero()) return Real(0.0, p);
        if (residue_degenerate(R, r, B, sys.bits)) {
          throw DegenerateResidue("R_{" + std::to_string(n) + "," + std::to_string(i) + "} vanishes");
        }
        return square(r) / R;
      };
      const Real q1 = ratio(aux.r1, aux.R1, w.B1, 1);
      const Real q2 = ratio(aux.r2, aux.R2, w.B2, 2);
      return 2 * (aux.s1 * aux.r1 + aux.s2 * aux.r2 - q1 - q2) - (aux.r1 + aux.r2 + n) * (aux.R1 + aux.R2);
    }
  }
  throw std::logic_error("sigma_n: unknown route");
}

}  // namespace jgl
