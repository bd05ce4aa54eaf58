#include "jgl/painleve4.hpp"

#include <string>

#include "jgl/errors.hpp"
#include "jgl/identities.hpp"
#include "jgl/numerics.hpp"

namespace jgl {

Real piv_hamiltonian(const Real& a1, const Real& a2, const Real& b1, const Real& b2, const Real& x, const Real& s,
                     int n) {
  const Real ab1 = a1 * b1;
  const Real ab2 = a2 * b2;
  return -2 * (ab1 + ab2 + n) * (a1 + a2) - (ab1 * b1 + ab2 * b2) + 2 * ((x - s) * ab1 + (x + s) * ab2 + n * x);
}

PIVState to_piv_state(const AuxQuantities& aux, const OrthoSystem& sys, int n) {
  if (aux.n != n) throw std::invalid_argument("to_piv_state: residues are for a different degree");
  const Real* R[] = {&aux.R1, &aux.R2};
  const Real* r[] = {&aux.r1, &aux.r2};
  for (int i = 0; i < 2; ++i) {
    // a_i needs r^2/R and b_i needs R/r; either ratio blowing up is fatal.
    const bool degenerate = r[i]->is_zero() || R[i]->is_zero() || abs(*R[i]) < ldexp(abs(*r[i]), -sys.bits / 2) ||
                            abs(*r[i]) < ldexp(abs(*R[i]), -sys.bits / 2);
    if (degenerate) {
      throw DegenerateResidue("a_" + std::to_string(i + 1) + ", b_" + std::to_string(i + 1) +
                              " undefined: residue vanishes at n = " + std::to_string(n));
    }
  }
  PIVState st;
  st.n = n;
  st.x = (aux.s1 + aux.s2) / 2;
  st.s = (aux.s2 - aux.s1) / 2;
  const Real m = aux.r1 + aux.r2 + n;
  st.a1 = square(aux.r1) / (aux.R1 * m);
  st.a2 = square(aux.r2) / (aux.R2 * m);
  st.b1 = aux.R1 * m / aux.r1;
  st.b2 = aux.R2 * m / aux.r2;
  st.H = piv_hamiltonian(st.a1, st.a2, st.b1, st.b2, st.x, st.s, n);
  return st;
}

ResiduePair from_piv_state(const PIVState& st) {
  const Real ab1 = st.a1 * st.b1;
  const Real ab2 = st.a2 * st.b2;
  const Real m = ab1 + ab2 + st.n;
  return ResiduePair{ab1 * st.b1 / m, ab2 * st.b2 / m, ab1, ab2};
}

std::vector<Real> piv_rhs(const PIVState& st) {
  const Real& a1 = st.a1;
  const Real& a2 = st.a2;
  const Real& b1 = st.b1;
  const Real& b2 = st.b2;
  const Real& x = st.x;
  const Real& s = st.s;
  const int n = st.n;
  return {
      -2 * a1 * (a1 + a2 + b1 - x + s),
      -2 * a2 * (a1 + a2 + b2 - x - s),
      square(b1) + 2 * b1 * (2 * a1 + a2 - x + s) + 2 * (a2 * b2 + n),
      square(b2) + 2 * b2 * (a1 + 2 * a2 - x - s) + 2 * (a1 * b1 + n),
  };
}

ReportList check_piv_state(const WeightParams& params, int n, const PrecisionContext& ctx) {
  if (n < 1) throw std::invalid_argument("check_piv_state: n must be positive");
  PrecisionScope scope(ctx.bits());
  const auto sys = build_ortho_system(params, n, ctx);
  const auto aux = aux_quantities(n, sys, ctx);
  const auto prev = aux_quantities(n - 1, sys, ctx);
  const auto st = to_piv_state(aux, sys, n);
  const auto back = from_piv_state(st);

  ReportList out;
  out.push_back(ResidualReport::make("round trip R_{n,1}", n, params, back.R1, aux.R1, thresholds::kRoundTrip));
  out.push_back(ResidualReport::make("round trip R_{n,2}", n, params, back.R2, aux.R2, thresholds::kRoundTrip));
  out.push_back(ResidualReport::make("round trip r_{n,1}", n, params, back.r1, aux.r1, thresholds::kRoundTrip));
  out.push_back(ResidualReport::make("round trip r_{n,2}", n, params, back.r2, aux.r2, thresholds::kRoundTrip));
  out.push_back(ResidualReport::make("H_IV = sigma_n + n (s1 + s2)", n, params, st.H,
                                     sigma_n(sys, n, SigmaRoute::two_p, ctx) + n * (aux.s1 + aux.s2),
                                     thresholds::kHamiltonian));
  out.push_back(ResidualReport::make("a_1 = R_{n-1,1}/2", n, params, st.a1, prev.R1 / 2, thresholds::kAShift));
  out.push_back(ResidualReport::make("a_2 = R_{n-1,2}/2", n, params, st.a2, prev.R2 / 2, thresholds::kAShift));
  return out;
}

ReportList check_hamilton_equations(const WeightParams& params, int n, const PrecisionContext& ctx,
                                    std::optional<Real> step) {
  if (n < 1) throw std::invalid_argument("check_hamilton_equations: n must be positive");
  const Precision p = ctx.precision();
  PrecisionScope scope(p.bits);
  const auto sys = build_ortho_system(params, n, ctx);
  const auto st = to_piv_state(aux_quantities(n, sys, ctx), sys, n);

  BivariateVecFn f = [&](const Real& s1, const Real& s2) {
    const auto q = rebuild_at(params, s1, s2, n, ctx);
    const auto qs = to_piv_state(aux_quantities(n, q, ctx), q, n);
    return std::vector<Real>{qs.a1, qs.a2, qs.b1, qs.b2};
  };
  // d/dx at fixed s moves both endpoints together.
  const auto d = directional_diff(f, Point2{Real(params.s1, p), Real(params.s2, p)},
                                  Point2{Real(1.0, p), Real(1.0, p)}, std::move(step), 1, ctx);
  const auto rhs = piv_rhs(st);
  const char* names[] = {"d_x a_1", "d_x a_2", "d_x b_1", "d_x b_2"};
  ReportList out;
  for (int k = 0; k < 4; ++k) {
    out.push_back(
        ResidualReport::make(names[k], n, params, d[k].value, rhs[k], thresholds::kHamilton, d[k].step));
  }
  return out;
}

ReportList check_recurrence_maps(const WeightParams& params, int n, const PrecisionContext& ctx,
                                 std::optional<Real> step) {
  if (n < 1) throw std::invalid_argument("check_recurrence_maps: n must be positive");
  const Precision p = ctx.precision();
  PrecisionScope scope(p.bits);
  const auto sys = build_ortho_system(params, n, ctx);
  const auto st = to_piv_state(aux_quantities(n, sys, ctx), sys, n);
  const Real ab1 = st.a1 * st.b1;
  const Real ab2 = st.a2 * st.b2;
  const Real m = ab1 + ab2 + n;

  ReportList out;
  out.push_back(ResidualReport::make("alpha_n in (a, b)", n, params, sys.alpha[n],
                                     (ab1 * st.b1 + ab2 * st.b2) / (2 * m), thresholds::kRecurrenceMap));
  out.push_back(ResidualReport::make("beta_n in (a, b)", n, params, sys.beta[n], m / 2, thresholds::kRecurrenceMap));
  out.push_back(ResidualReport::make("alpha_{n-1} = a_1 + a_2", n, params, sys.alpha[n - 1], st.a1 + st.a2,
                                     thresholds::kRecurrenceMap));

  BivariateFn log_h = [&](const Real& s1, const Real& s2) {
    return log(rebuild_at(params, s1, s2, n, ctx).h[n - 1]);
  };
  const auto d = directional_diff(log_h, Point2{Real(params.s1, p), Real(params.s2, p)},
                                  Point2{Real(1.0, p), Real(1.0, p)}, std::move(step), 1, ctx);
  out.push_back(ResidualReport::make("a_1 + a_2 = -(1/2) d_x ln h_{n-1}", n, params, -d.value / 2, st.a1 + st.a2,
                                     thresholds::kRecurrenceMap, d.step));
  return out;
}

}  // namespace jgl
