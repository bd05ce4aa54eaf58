#include "jgl/softedge.hpp"

#include <cmath>
#include <sstream>

#include "jgl/errors.hpp"

namespace jgl {

namespace {

Real nth_root6(int n, Precision p) { return pow(Real(n, p), Real(1.0, p) / 6); }

// A vanishing jump height selects the single-jump reduction, which strict
// mode rejects.
bool strict_edge(const EdgeWeights& w) { return !w.B1.is_zero() && !w.B2.is_zero(); }

std::string pair_label(const std::string& base, int n_lo, int n_hi) {
  return base + " factor " + std::to_string(n_hi) + "/" + std::to_string(n_lo);
}

// Per-doubling decrease reports for a positive sequence along the sweep.
void push_decrease(ReportList& out, const std::string& base, const std::vector<int>& ns,
                   const std::vector<Real>& magnitudes, const WeightParams& params) {
  for (std::size_t k = 0; k + 1 < ns.size(); ++k) {
    const Real factor = magnitudes[k + 1] / magnitudes[k];
    out.push_back(ResidualReport::make(pair_label(base, ns[k], ns[k + 1]), ns[k + 1], params, factor,
                                       Real(thresholds::kDecreaseCentre, Precision{factor.precision()}),
                                       thresholds::kDecreaseRadius));
  }
}

// Reports carry the weight at the centre of the largest-n stencil.
WeightParams nominal_params(const EdgeStencil& st) {
  const auto& c = st.points[0];
  return WeightParams{st.weights.A, st.weights.B1, st.weights.B2, c.s1, c.s2, strict_edge(st.weights)};
}

}  // namespace

EdgeWeights EdgeWeights::make(double A, double B1, double B2) { return EdgeWeights{Real(A), Real(B1), Real(B2)}; }

std::pair<Real, Real> scaled_endpoints(int n, const Real& t1, const Real& t2, const PrecisionContext& ctx) {
  if (!(t1 < t2)) throw OrderViolation("t1 < t2 required, got t1 = " + t1.to_string(10) + ", t2 = " + t2.to_string(10));
  if (n < 1) throw std::invalid_argument("scaled_endpoints: n must be positive");
  const Precision p = ctx.precision();
  const Real edge = sqrt(Real(2 * n, p));
  const Real scale = sqrt(Real(2, p)) * nth_root6(n, p);
  return {edge + Real(t1, p) / scale, edge + Real(t2, p) / scale};
}

EdgeStencil sample_stencil(const EdgeWeights& weights, int n, const Real& t1, const Real& t2, const Real& dt,
                           const PrecisionContext& ctx) {
  const auto start = ctx.with_bits(std::max(ctx.bits(), default_bits(n)));
  EdgeStencil st;
  st.weights = weights;
  st.n = n;
  st.t1 = t1;
  st.t2 = t2;
  st.dt = dt;
  long bits = start.bits();
  for (std::size_t k = 0; k < 7; ++k) {
    const Precision p{bits};
    PrecisionScope scope(bits);
    const Real pt1 = Real(t1, p) + kStencilOffsets[k][0] * Real(dt, p);
    const Real pt2 = Real(t2, p) + kStencilOffsets[k][1] * Real(dt, p);
    auto [s1, s2] = scaled_endpoints(n, pt1, pt2, start.with_bits(bits));
    const WeightParams params{weights.A, weights.B1, weights.B2, s1, s2, strict_edge(weights)};
    const OrthoSystem sys = k == 0 ? build_ortho_system_auto(params, n, start)
                                   : build_ortho_system(params, n, start.with_bits(bits), BuildOptions{false});
    if (k == 0) bits = sys.bits;
    const auto ctx_k = start.with_bits(sys.bits);
    const auto aux = aux_quantities(n, sys, ctx_k);
    const Real root6 = nth_root6(n, Precision{sys.bits});
    ScalingPoint& sp = st.points[k];
    sp.n = n;
    sp.t1 = pt1;
    sp.t2 = pt2;
    sp.s1 = s1;
    sp.s2 = s2;
    sp.mu1_hat = root6 * aux.R1;
    sp.nu1_hat = root6 * aux.R2;
    sp.sigma_hat = sigma_n(sys, n, SigmaRoute::two_p, ctx_k) / (root6 * sqrt(Real(2, Precision{sys.bits})));
    sp.alpha_n = sys.alpha[n];
    sp.beta_n = sys.beta[n];
    sp.bits = sys.bits;
  }
  return st;
}

StencilDerivs stencil_derivs(const std::array<Real, 7>& v, const Real& dt) {
  const Real dt2 = square(dt);
  StencilDerivs d;
  d.f = v[0];
  d.d1 = (v[1] - v[2]) / (2 * dt);
  d.d2 = (v[3] - v[4]) / (2 * dt);
  d.d11 = (v[1] - 2 * v[0] + v[2]) / dt2;
  d.d22 = (v[3] - 2 * v[0] + v[4]) / dt2;
  d.dxi = (v[5] - v[6]) / (2 * dt);
  d.dxixi = (v[5] - 2 * v[0] + v[6]) / dt2;
  d.d12 = (d.dxixi - d.d11 - d.d22) / 2;
  return d;
}

EdgeFit fit_edge(const std::vector<int>& ns, const std::vector<Real>& values) {
  if (ns.size() != values.size() || ns.size() < 2) throw std::invalid_argument("fit_edge: need >= 2 samples");
  const Precision p{values.front().precision()};
  // Normal equations for [1, x] with x = n^{-1/3}.
  Real sx(p), sxx(p), sy(p), sxy(p);
  const Real m(static_cast<long>(ns.size()), p);
  for (std::size_t k = 0; k < ns.size(); ++k) {
    const Real x = pow(Real(ns[k], p), Real(-1.0, p) / 3);
    sx += x;
    sxx += square(x);
    sy += values[k];
    sxy += x * values[k];
  }
  const Real det = m * sxx - square(sx);
  return EdgeFit{(sxx * sy - sx * sxy) / det, (m * sxy - sx * sy) / det};
}

Real hii_hamiltonian(const Real& v1, const Real& v2, const Real& w1, const Real& w2, const Real& t1, const Real& t2) {
  return v1 * square(w1) + v2 * square(w2) - square(v1 + v2) - t1 * v1 - t2 * v2;
}

EdgeExtract extract_edge(const std::vector<EdgeStencil>& stencils, const ExtractOptions& options) {
  if (stencils.size() < 3) throw std::invalid_argument("extract_edge: need at least three values of n");
  EdgeExtract ex;
  ex.weights = stencils.front().weights;
  ex.t1 = stencils.front().t1;
  ex.t2 = stencils.front().t2;
  ex.dt = stencils.front().dt;
  for (std::size_t k = 0; k < stencils.size(); ++k) {
    const auto& st = stencils[k];
    if (st.t1 != ex.t1 || st.t2 != ex.t2 || st.dt != ex.dt) {
      throw std::invalid_argument("extract_edge: stencils disagree on (t1, t2, dt)");
    }
    if (k > 0 && st.n != 2 * stencils[k - 1].n) throw std::invalid_argument("extract_edge: n must double");
    ex.n_list.push_back(st.n);
  }
  const Precision p{stencils.front().points[0].bits};
  PrecisionScope scope(p.bits);

  // Extrapolate every stencil point, then difference the limits.
  std::array<Real, 7> mu_lim, nu_lim;
  for (std::size_t j = 0; j < 7; ++j) {
    std::vector<Real> mus, nus;
    for (const auto& st : stencils) {
      mus.emplace_back(st.points[j].mu1_hat, p);
      nus.emplace_back(st.points[j].nu1_hat, p);
    }
    const EdgeFit fm = fit_edge(ex.n_list, mus);
    const EdgeFit fn = fit_edge(ex.n_list, nus);
    mu_lim[j] = fm.c0;
    nu_lim[j] = fn.c0;
    if (j == 0) {
      ex.mu1 = fm.c0;
      ex.mu2 = fm.c1;
      ex.nu1 = fn.c0;
      ex.nu2 = fn.c1;
    }
  }
  const Real dt(ex.dt, p);
  ex.mu = stencil_derivs(mu_lim, dt);
  ex.nu = stencil_derivs(nu_lim, dt);
  const Real root2 = sqrt(Real(2, p));
  ex.v1 = -ex.mu.f / root2;
  ex.v2 = -ex.nu.f / root2;
  ex.v1_xi = -ex.mu.dxi / root2;
  ex.v2_xi = -ex.nu.dxi / root2;
  ex.v1_xixi = -ex.mu.dxixi / root2;
  ex.v2_xixi = -ex.nu.dxixi / root2;
  ex.w1 = ex.weights.B1.is_zero() ? Real(0.0, p) : ex.v1_xi / (2 * ex.v1);
  ex.w2 = ex.weights.B2.is_zero() ? Real(0.0, p) : ex.v2_xi / (2 * ex.v2);
  ex.H2 = hii_hamiltonian(ex.v1, ex.v2, ex.w1, ex.w2, Real(ex.t1, p), Real(ex.t2, p));
  ex.envelope = max(abs(ex.mu2), abs(ex.nu2)) * pow(Real(ex.n_list.back(), p), Real(-1.0, p) / 3);

  auto rates = [&](const std::string& name, Real ScalingPoint::*field) {
    for (std::size_t k = 0; k + 2 < stencils.size(); ++k) {
      const Real a(stencils[k].points[0].*field, p);
      const Real b(stencils[k + 1].points[0].*field, p);
      const Real c(stencils[k + 2].points[0].*field, p);
      const Real factor = (c - b) / (b - a);
      Real exponent = -log(abs(factor)) / log(Real(2, p));
      ex.rate_estimates.push_back(RateEstimate{name, stencils[k].n, factor, std::move(exponent)});
    }
  };
  if (!ex.weights.B1.is_zero()) rates("mu1_hat", &ScalingPoint::mu1_hat);
  if (!ex.weights.B2.is_zero()) rates("nu1_hat", &ScalingPoint::nu1_hat);
  rates("sigma_hat", &ScalingPoint::sigma_hat);

  if (options.enforce_rate) {
    for (const auto& r : ex.rate_estimates) {
      if (r.quantity == "sigma_hat") continue;
      const double gap = std::abs(r.exponent.to_double() - 1.0 / 3.0);
      if (!(r.factor > 0) || !(gap <= thresholds::kEdgeExponent)) {
        throw RateMismatch(r.quantity + " from n = " + std::to_string(r.n_from) + ": exponent " +
                           r.exponent.to_string(6) + ", contraction " + r.factor.to_string(6));
      }
    }
  }
  return ex;
}

EdgeExtract extract_edge(const EdgeWeights& weights, const Real& t1, const Real& t2, const std::vector<int>& n_list,
                         const PrecisionContext& ctx, const ExtractOptions& options) {
  std::vector<EdgeStencil> stencils;
  const Real dt = Real::parse("1e-3", ctx.precision());
  for (int n : n_list) stencils.push_back(sample_stencil(weights, n, t1, t2, dt, ctx));
  return extract_edge(stencils, options);
}

ReportList check_edge_rates(const EdgeExtract& ex) {
  ReportList out;
  const WeightParams w{ex.weights.A, ex.weights.B1, ex.weights.B2, ex.t1, ex.t2, false};
  for (const auto& r : ex.rate_estimates) {
    if (r.quantity == "sigma_hat") continue;
    const Precision p{r.factor.precision()};
    const std::string span = " from n=" + std::to_string(r.n_from);
    out.push_back(ResidualReport::make(r.quantity + " correction exponent" + span, 4 * r.n_from, w, r.exponent,
                                       Real(1.0, p) / 3, thresholds::kEdgeExponent));
    out.push_back(ResidualReport::make(r.quantity + " difference contraction" + span, 4 * r.n_from, w, r.factor,
                                       pow(Real(2.0, p), Real(-1.0, p) / 3), thresholds::kEdgeContraction));
  }
  return out;
}

namespace {

// Residuals of the two (mu1, nu1) PDEs.
std::pair<Real, Real> mu_nu_residuals(const StencilDerivs& M, const StencilDerivs& N, const Real& t1, const Real& t2) {
  const Real root2 = sqrt(Real(2, Precision{M.f.precision()}));
  const Real S = M.f + N.f;
  const Real S1 = M.d1 + N.d1;
  const Real S2 = M.d2 + N.d2;
  const Real S12 = M.d12 + N.d12;
  // An identically vanishing component (B_i = 0) satisfies its equation
  // trivially; the other one reduces to the single-jump case.
  const Real r1 = M.f.is_zero() ? M.f : (M.d11 + N.d11 + S12) - square(S1) / (2 * M.f) + 2 * M.f * (root2 * S - t1);
  const Real r2 = N.f.is_zero() ? N.f : (M.d22 + N.d22 + S12) - square(S2) / (2 * N.f) + 2 * N.f * (root2 * S - t2);
  return {r1, r2};
}

// Residuals of v_ixixi - v_ixi^2/(2 v_i) - 2 v_i (2 (v1 + v2) + t_i).
std::pair<Real, Real> pii_residuals(const StencilDerivs& M, const StencilDerivs& N, const Real& t1, const Real& t2) {
  const Real root2 = sqrt(Real(2, Precision{M.f.precision()}));
  const Real v1 = -M.f / root2, v2 = -N.f / root2;
  const Real v1x = -M.dxi / root2, v2x = -N.dxi / root2;
  const Real v1xx = -M.dxixi / root2, v2xx = -N.dxixi / root2;
  auto residual = [&](const Real& v, const Real& vx, const Real& vxx, const StencilDerivs& D, const Real& t) {
    if (!v.is_zero()) return vxx - square(vx) / (2 * v) - 2 * v * (2 * (v1 + v2) + t);
    if (D.d1.is_zero() && D.d2.is_zero() && D.d11.is_zero() && D.d22.is_zero()) return v;
    throw DegenerateResidue("v_i vanishes on the stencil");
  };
  return {residual(v1, v1x, v1xx, M, t1), residual(v2, v2x, v2xx, N, t2)};
}

template <typename Residuals>
ReportList per_n_and_limit(const std::vector<EdgeStencil>& stencils, const EdgeExtract& ex, const std::string& name,
                           Residuals residuals) {
  const Precision p{stencils.front().points[0].bits};
  PrecisionScope scope(p.bits);
  const Real t1(ex.t1, p), t2(ex.t2, p), dt(ex.dt, p);
  std::vector<Real> first, second;
  for (const auto& st : stencils) {
    std::array<Real, 7> mu, nu;
    for (std::size_t k = 0; k < 7; ++k) {
      mu[k] = Real(st.points[k].mu1_hat, p);
      nu[k] = Real(st.points[k].nu1_hat, p);
    }
    auto [r1, r2] = residuals(stencil_derivs(mu, dt), stencil_derivs(nu, dt), t1, t2);
    first.push_back(abs(r1));
    second.push_back(abs(r2));
  }
  const WeightParams params = nominal_params(stencils.back());
  ReportList out;
  auto [l1, l2] = residuals(ex.mu, ex.nu, t1, t2);
  const int n_max = ex.n_list.back();
  const bool active[] = {!ex.weights.B1.is_zero(), !ex.weights.B2.is_zero()};
  const std::vector<Real>* per_n[] = {&first, &second};
  const Real* limit[] = {&l1, &l2};
  for (int i = 0; i < 2; ++i) {
    if (!active[i]) continue;
    const std::string tag = name + "[" + std::to_string(i + 1) + "]";
    push_decrease(out, tag + " per-n residual", ex.n_list, *per_n[i], params);
    out.push_back(ResidualReport::make(tag + " extrapolated residual vs envelope", n_max, params, abs(*limit[i]),
                                       Real(0.0, p), ex.envelope.to_double()));
  }
  return out;
}

}  // namespace

ReportList check_mu_nu_pde(const std::vector<EdgeStencil>& stencils, const EdgeExtract& ex) {
  ReportList out = per_n_and_limit(stencils, ex, "mu-nu PDE", mu_nu_residuals);
  out.push_back(ResidualReport::make("d_t2 mu1 = d_t1 nu1", ex.n_list.back(), nominal_params(stencils.back()), ex.mu.d2,
                                     ex.nu.d1, thresholds::kEdgeSymmetry));
  return out;
}

ReportList check_pii_residual(const std::vector<EdgeStencil>& stencils, const EdgeExtract& ex) {
  return per_n_and_limit(stencils, ex, "coupled PII", pii_residuals);
}

ReportList check_sigma_and_recurrence_asymptotics(const std::vector<EdgeStencil>& stencils, const EdgeExtract& ex) {
  const Precision p{stencils.front().points[0].bits};
  PrecisionScope scope(p.bits);
  const WeightParams params = nominal_params(stencils.back());
  const Real root2 = sqrt(Real(2, p));
  const Real vsum = ex.v1 + ex.v2;
  std::vector<Real> sigma_dev, alpha_dev, beta_rem;
  for (const auto& st : stencils) {
    const auto& c = st.points[0];
    const Real root6 = nth_root6(st.n, p);
    sigma_dev.push_back(abs(Real(c.sigma_hat, p) - ex.H2));
    alpha_dev.push_back(abs(Real(c.alpha_n, p) + vsum / (root2 * root6)));
    beta_rem.push_back(abs(Real(c.beta_n, p) - Real(st.n, p) / 2 + vsum * square(root6) / 2));
  }
  ReportList out;
  push_decrease(out, "|sigma_hat - H2|", ex.n_list, sigma_dev, params);
  for (std::size_t k = 0; k + 1 < ex.n_list.size(); ++k) {
    const Real exponent = log(alpha_dev[k] / alpha_dev[k + 1]) / log(Real(2, p));
    out.push_back(ResidualReport::make(pair_label("alpha_n deviation exponent", ex.n_list[k], ex.n_list[k + 1]),
                                       ex.n_list[k + 1], params, exponent, Real(0.5, p),
                                       thresholds::kAlphaExponent));
  }
  const auto& top = stencils.back().points[0];
  const int n_max = stencils.back().n;
  // Sign agreement: report sign(alpha_n) against sign(-(v1 + v2)).
  out.push_back(ResidualReport::make("sign alpha_n = sign -(v1 + v2)", n_max, params, Real(top.alpha_n.sign(), p),
                                     Real((-vsum).sign(), p), 0.5));
  const Real beta_tol = 2 * (abs(ex.v1) + abs(ex.v2)) * pow(Real(n_max, p), Real(-2.0, p) / 3);
  out.push_back(ResidualReport::make("beta_n / n -> 1/2", n_max, params, Real(top.beta_n, p) / n_max, Real(0.5, p),
                                     beta_tol.to_double()));
  Real worst(p);
  for (const auto& r : beta_rem) worst = max(worst, r);
  out.push_back(ResidualReport::make("beta_n remainder O(1)", n_max, params, worst, Real(0.0, p), 1.0));
  return out;
}

Real hii_pde_residual(const StencilDerivs& H, const Real& t1, const Real& t2, HiiPdeForm form) {
  Real bracket = t1 * H.d1 + t2 * H.d2 - H.f;
  if (form == HiiPdeForm::with_gradient_term) bracket -= square(H.d1 + H.d2);
  const Real a = H.d1 * square(H.d22 + H.d12);
  const Real b = H.d2 * square(H.d11 + H.d12);
  const Real c = 4 * H.d1 * H.d2 * bracket;
  const Real scale = max(abs(a), max(abs(b), abs(c)));
  if (scale.is_zero()) return Real(0.0, Precision{scale.precision()});
  return abs(a + b - c) / scale;
}

ReportList check_hii_pde(const std::vector<EdgeStencil>& stencils, const EdgeExtract& ex, HiiPdeForm form) {
  const Precision p{stencils.front().points[0].bits};
  PrecisionScope scope(p.bits);
  const Real t1(ex.t1, p), t2(ex.t2, p), dt(ex.dt, p);
  const std::string name =
      form == HiiPdeForm::as_published ? "H_II PDE (as published)" : "H_II PDE (with gradient term)";
  std::vector<Real> residuals;
  for (const auto& st : stencils) {
    std::array<Real, 7> h;
    for (std::size_t k = 0; k < 7; ++k) h[k] = Real(st.points[k].sigma_hat, p);
    residuals.push_back(hii_pde_residual(stencil_derivs(h, dt), t1, t2, form));
  }
  const WeightParams params = nominal_params(stencils.back());
  ReportList out;
  push_decrease(out, name + " per-n residual", ex.n_list, residuals, params);
  out.push_back(ResidualReport::make(name + " residual vs envelope", ex.n_list.back(), params, residuals.back(),
                                     Real(0.0, p), ex.envelope.to_double()));
  return out;
}

std::string edge_csv(const std::vector<EdgeStencil>& stencils) {
  std::ostringstream os;
  os << "n,t1,t2,mu1_hat,nu1_hat,sigma_hat,alpha_n,beta_n\n";
  for (const auto& st : stencils) {
    const auto& c = st.points[0];
    os << c.n << ',' << c.t1.to_string() << ',' << c.t2.to_string() << ',' << c.mu1_hat.to_string() << ','
       << c.nu1_hat.to_string() << ',' << c.sigma_hat.to_string() << ',' << c.alpha_n.to_string() << ','
       << c.beta_n.to_string() << '\n';
  }
  return os.str();
}

}  // namespace jgl
