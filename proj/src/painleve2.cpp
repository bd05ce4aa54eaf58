#include "jgl/painleve2.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "jgl/errors.hpp"

namespace jgl {

namespace {

constexpr int kStages = 7;

// Dormand-Prince 5(4) tableau as exact rationals.
struct Tableau {
  std::array<Real, kStages> c;
  std::array<std::array<Real, kStages>, kStages> a;
  std::array<Real, kStages> b;  // fifth order, also row 7 of a (FSAL)
  std::array<Real, kStages> e;  // b - b_hat
};

Tableau make_tableau(Precision p) {
  auto q = [p](long num, long den) { return Real(num, p) / Real(den, p); };
  Tableau t;
  for (auto& row : t.a) row.fill(Real(p));
  t.c = {Real(p), q(1, 5), q(3, 10), q(4, 5), q(8, 9), q(1, 1), q(1, 1)};
  t.a[1][0] = q(1, 5);
  t.a[2][0] = q(3, 40);
  t.a[2][1] = q(9, 40);
  t.a[3][0] = q(44, 45);
  t.a[3][1] = q(-56, 15);
  t.a[3][2] = q(32, 9);
  t.a[4][0] = q(19372, 6561);
  t.a[4][1] = q(-25360, 2187);
  t.a[4][2] = q(64448, 6561);
  t.a[4][3] = q(-212, 729);
  t.a[5][0] = q(9017, 3168);
  t.a[5][1] = q(-355, 33);
  t.a[5][2] = q(46732, 5247);
  t.a[5][3] = q(49, 176);
  t.a[5][4] = q(-5103, 18656);
  t.b = {q(35, 384), Real(p), q(500, 1113), q(125, 192), q(-2187, 6784), q(11, 84), Real(p)};
  t.a[6] = t.b;
  t.e = {q(71, 57600), Real(p), q(-71, 16695), q(71, 1920), q(-17253, 339200), q(22, 525), q(-1, 40)};
  return t;
}

// The system plus the flow-identity quadrature Q' = -(v1 + v2).
using Vec = std::array<Real, 5>;

Vec rhs5(const Real& xi, const Real& eta, const Vec& y) {
  PIIState s;
  s.xi = xi;
  s.eta = eta;
  s.v1 = y[0];
  s.v2 = y[1];
  s.w1 = y[2];
  s.w2 = y[3];
  const auto f = pii_rhs(s);
  return {f[0], f[1], f[2], f[3], -(y[0] + y[1])};
}

}  // namespace

PIIState PIIState::make(Real xi, Real eta, Real v1, Real v2, Real w1, Real w2) {
  PIIState s{std::move(xi), std::move(eta), std::move(v1), std::move(v2), std::move(w1), std::move(w2), Real()};
  s.H2 = hii_hamiltonian(s.v1, s.v2, s.w1, s.w2, s.xi, s.xi + s.eta);
  return s;
}

std::array<Real, 4> pii_rhs(const PIIState& s) {
  const Real t2 = s.xi + s.eta;
  const Real vsum2 = 2 * (s.v1 + s.v2);
  return {2 * s.v1 * s.w1, 2 * s.v2 * s.w2, vsum2 + s.xi - square(s.w1), vsum2 + t2 - square(s.w2)};
}

PIITrajectory integrate_pii(const PIIState& initial, const Real& xi_end, const Real& tol, const PrecisionContext& ctx,
                            const std::vector<Real>& sample_points) {
  if (!(tol > 0)) throw std::invalid_argument("integrate_pii: tol must be positive");
  for (const Real* v : {&initial.xi, &initial.eta, &initial.v1, &initial.v2, &initial.w1, &initial.w2}) {
    if (!v->is_finite()) throw std::invalid_argument("integrate_pii: initial state must be finite");
  }
  const Precision p = ctx.precision();
  PrecisionScope scope(p.bits);
  const Tableau tab = make_tableau(p);
  const Real eta(initial.eta, p);
  const Real end(xi_end, p);
  const int dir = end >= initial.xi ? 1 : -1;

  // Sample points strictly inside the span, in integration order, then the end.
  std::vector<Real> stops;
  for (const auto& s : sample_points) {
    const Real sp(s, p);
    if (dir * (sp - initial.xi) > 0 && dir * (end - sp) > 0) stops.push_back(sp);
  }
  std::sort(stops.begin(), stops.end(), [dir](const Real& a, const Real& b) { return dir > 0 ? a < b : a > b; });
  stops.push_back(end);

  PIIState first = PIIState::make(Real(initial.xi, p), eta, Real(initial.v1, p), Real(initial.v2, p),
                                  Real(initial.w1, p), Real(initial.w2, p));
  PIITrajectory traj;
  traj.max_flow_defect = Real(p);
  traj.samples.push_back(first);
  Real xi = first.xi;
  Vec y = {first.v1, first.v2, first.w1, first.w2, first.H2};
  if (xi == end) return traj;

  Real h = dir * min(abs(end - xi), pow(Real(tol, p), Real(1, p) / 5));
  const Real h_floor = pow2(-(p.bits - 8), p);
  constexpr long kMaxSteps = 10'000'000;
  std::array<Vec, kStages> k;
  k[0] = rhs5(xi, eta, y);
  std::size_t next_stop = 0;
  while (next_stop < stops.size()) {
    const Real& target = stops[next_stop];
    bool clipped = false;
    if (dir * (xi + h - target) >= 0) {
      h = target - xi;
      clipped = true;
    }
    if (!clipped && abs(h) < h_floor * max(Real(1, p), abs(xi))) {
      throw StepCollapse("step " + h.to_string(6) + " at xi = " + xi.to_string(20));
    }
    Vec y_new;
    for (int s = 1; s < kStages; ++s) {
      Vec ys = y;
      for (int j = 0; j < s; ++j) {
        if (tab.a[s][j].is_zero()) continue;
        for (int i = 0; i < 5; ++i) ys[i] += h * tab.a[s][j] * k[j][i];
      }
      k[s] = rhs5(xi + tab.c[s] * h, eta, ys);
      // FSAL: the last stage is evaluated at the fifth-order solution.
      if (s == kStages - 1) y_new = std::move(ys);
    }
    Real err_norm(p);
    for (int i = 0; i < 4; ++i) {
      Real e(p);
      for (int s = 0; s < kStages; ++s) e += tab.e[s] * k[s][i];
      e = abs(h * e);
      err_norm = max(err_norm, e / (tol * max(Real(1, p), abs(y_new[i]))));
    }
    if (!err_norm.is_finite()) err_norm = Real(1e10, p);
    if (err_norm <= 1) {
      xi = clipped ? target : xi + h;
      y = std::move(y_new);
      k[0] = k[kStages - 1];
      PIIState st = PIIState::make(xi, eta, y[0], y[1], y[2], y[3]);
      traj.max_flow_defect = max(traj.max_flow_defect, abs(st.H2 - y[4]));
      if (clipped) {
        traj.samples.push_back(st);
        ++next_stop;
      }
      traj.steps.push_back(std::move(st));
      ++traj.accepted;
    } else {
      ++traj.rejected;
    }
    if (traj.accepted + traj.rejected > kMaxSteps) throw StepCollapse("step budget exhausted at xi = " + xi.to_string(20));
    const double en = std::max(err_norm.to_double(), 1e-10);
    const double grow = std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
    if (!clipped || err_norm > 1) h = h * grow;
  }
  return traj;
}

ReportList check_pii_integrator(const PIIState& initial, const Real& xi_end, const Real& tol,
                                const PrecisionContext& ctx) {
  const Precision p = ctx.precision();
  PrecisionScope scope(p.bits);
  std::vector<Real> pts;
  for (int k = 1; k <= 8; ++k) pts.push_back(initial.xi + (xi_end - initial.xi) * k / 9);
  const Real tol_fine = tol / 10;
  const auto coarse = integrate_pii(initial, xi_end, tol, ctx, pts);
  const auto fine = integrate_pii(initial, xi_end, tol_fine, ctx, pts);
  Real gap(p);
  for (std::size_t k = 0; k < coarse.samples.size(); ++k) {
    const auto& a = coarse.samples[k];
    const auto& b = fine.samples[k];
    for (const auto& d : {a.v1 - b.v1, a.v2 - b.v2, a.w1 - b.w1, a.w2 - b.w2}) gap = max(gap, abs(d));
  }
  auto zero_v = initial;
  zero_v.v1 = Real(p);
  zero_v.v2 = Real(p);
  const auto flat = integrate_pii(zero_v, xi_end, tol, ctx, pts);
  Real v_max(p);
  for (const auto& st : flat.steps) v_max = max(v_max, max(abs(st.v1), abs(st.v2)));

  const WeightParams w{Real(p), Real(p), Real(p), initial.xi, initial.xi + initial.eta, false};
  const double bound = 10 * tol.to_double();
  ReportList out;
  out.push_back(ResidualReport::make("flow identity dH2/dxi + (v1 + v2) = 0", 0, w, coarse.max_flow_defect, Real(p),
                                     bound));
  out.push_back(ResidualReport::make("trajectory gap tol vs tol/10", 0, w, gap, Real(p), bound));
  out.push_back(ResidualReport::at_least("flow defect reduction per tol decade", 0, w,
                                         coarse.max_flow_defect / fine.max_flow_defect, Real(8, p)));
  out.push_back(ResidualReport::make("v = 0 subspace invariant", 0, w, v_max, Real(p),
                                     std::numeric_limits<double>::min()));
  return out;
}

PIIState pii_state_from_extract(const EdgeExtract& ex) {
  return PIIState::make(ex.t1, ex.t2 - ex.t1, ex.v1, ex.v2, ex.w1, ex.w2);
}

namespace {

// Extractions carry the width of their own factorization; compare at one.
PIIState at_precision(const PIIState& s, Precision p) {
  return PIIState::make(Real(s.xi, p), Real(s.eta, p), Real(s.v1, p), Real(s.v2, p), Real(s.w1, p), Real(s.w2, p));
}

}  // namespace

ResidualReport match_against(const EdgeExtract& ex, const std::vector<EdgeExtract>& fresh, const Real& tol,
                             const PrecisionContext& ctx) {
  if (fresh.empty()) throw std::invalid_argument("match_against: no fresh extractions");
  const Precision p = ctx.precision();
  PrecisionScope scope(p.bits);
  const PIIState start = at_precision(pii_state_from_extract(ex), p);
  Real worst(p);
  for (const auto& f : fresh) {
    if (abs((f.t2 - f.t1) - start.eta) > pow2(-p.bits / 2, p)) {
      throw std::invalid_argument("match_against: fresh extraction has a different eta");
    }
    const auto traj = integrate_pii(start, f.t1, tol, ctx);
    const PIIState& end = traj.samples.back();
    const PIIState target = at_precision(pii_state_from_extract(f), p);
    worst = max(worst, max(abs(end.v1 - target.v1), max(abs(end.v2 - target.v2), abs(end.H2 - target.H2))));
  }
  const WeightParams w{ex.weights.A, ex.weights.B1, ex.weights.B2, ex.t1, ex.t2, false};
  return ResidualReport::make("PII trajectory vs finite-n extraction", ex.n_list.back(), w, worst, Real(p),
                              ex.envelope.to_double());
}

ResidualReport match_finite_n(const EdgeExtract& ex, const Real& xi_span, const PrecisionContext& ctx,
                              const Real& tol) {
  if (xi_span < 0) throw std::invalid_argument("match_finite_n: xi_span must be non-negative");
  if (xi_span.is_zero()) return match_against(ex, {ex}, tol, ctx);
  ExtractOptions opts;
  opts.enforce_rate = false;
  std::vector<EdgeExtract> fresh;
  for (int sgn : {-1, 1}) {
    const Real t1 = ex.t1 + sgn * xi_span;
    fresh.push_back(extract_edge(ex.weights, t1, t1 + (ex.t2 - ex.t1), ex.n_list, ctx, opts));
  }
  return match_against(ex, fresh, tol, ctx);
}

std::string trajectory_csv(const std::vector<PIIState>& states) {
  std::ostringstream os;
  os << "xi,v1,v2,w1,w2,H2\n";
  for (const auto& s : states) {
    os << s.xi.to_string(40) << ',' << s.v1.to_string(40) << ',' << s.v2.to_string(40) << ','
       << s.w1.to_string(40) << ',' << s.w2.to_string(40) << ',' << s.H2.to_string(40) << '\n';
  }
  return os.str();
}

}  // namespace jgl
