#pragma once

// Double scaling s_i = sqrt(2n) + t_i / (sqrt(2) n^{1/6}) at the soft edge:
// finite-n samples on a small (t1, t2) stencil, extrapolation of
// n^{1/6} R_{n,i} in n^{-1/3}, and residual/rate checks of the limiting
// equations.

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "jgl/ortho.hpp"
#include "jgl/report.hpp"

namespace jgl {

namespace thresholds {
/// Observed correction exponent of n^{1/6} R_{n,i} must be 1/3 within this.
inline constexpr double kEdgeExponent = 0.2;
/// Successive-difference contraction must be 2^{-1/3} within this.
inline constexpr double kEdgeContraction = 0.15;
/// Per-doubling decrease factors must lie in (0.6, 1.0): centre 0.8, radius 0.2.
inline constexpr double kDecreaseCentre = 0.8;
inline constexpr double kDecreaseRadius = 0.2;
/// alpha_n deviation exponent must be 1/2 within this.
inline constexpr double kAlphaExponent = 0.2;
/// Mixed-partial symmetry of the extrapolated limits (finite-difference and
/// extrapolation error at dt = 1e-3).
inline constexpr double kEdgeSymmetry = 1e-5;
}  // namespace thresholds

/// Jump heights; the endpoints come from the scaling. A zero height gives
/// the single-jump reduction: that component vanishes identically and its
/// equations and rates are skipped.
struct EdgeWeights {
  Real A, B1, B2;
  static EdgeWeights make(double A, double B1, double B2);
};

/// Throws OrderViolation unless t1 < t2.
std::pair<Real, Real> scaled_endpoints(int n, const Real& t1, const Real& t2, const PrecisionContext& ctx);

struct ScalingPoint {
  int n = 0;
  Real t1, t2, s1, s2;
  Real mu1_hat;    // n^{1/6} R_{n,1}
  Real nu1_hat;    // n^{1/6} R_{n,2}
  Real sigma_hat;  // n^{-1/6} sigma_n / sqrt(2)
  Real alpha_n, beta_n;
  long bits = 0;
};

/// Offsets of the seven-point stencil in units of dt:
/// (0,0), (+1,0), (-1,0), (0,+1), (0,-1), (+1,+1), (-1,-1).
inline constexpr std::array<std::array<int, 2>, 7> kStencilOffsets = {
    {{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, -1}}};

struct EdgeStencil {
  EdgeWeights weights;
  int n = 0;
  Real t1, t2, dt;
  std::array<ScalingPoint, 7> points;
};

/// Builds the pipeline at every stencil point. Precision: the centre is
/// built with build_ortho_system_auto starting from max(ctx.bits(),
/// default_bits(n)); the other six points reuse the verified width.
EdgeStencil sample_stencil(const EdgeWeights& weights, int n, const Real& t1, const Real& t2, const Real& dt,
                           const PrecisionContext& ctx);

/// Value and partial derivatives from a stencil of values, by central
/// differences. dxi is along (1, 1), i.e. d/dt1 + d/dt2.
struct StencilDerivs {
  Real f, d1, d2, d11, d22, d12, dxi, dxixi;
};
StencilDerivs stencil_derivs(const std::array<Real, 7>& values, const Real& dt);

/// c0 + c1 n^{-1/3}, least squares.
struct EdgeFit {
  Real c0, c1;
};
EdgeFit fit_edge(const std::vector<int>& ns, const std::vector<Real>& values);

/// Observed exponent and contraction factor from three values at n, 2n, 4n.
struct RateEstimate {
  std::string quantity;
  int n_from = 0;
  Real factor;    // (q(4n) - q(2n)) / (q(2n) - q(n))
  Real exponent;  // -log2(factor): the gamma in q = c0 + c1 n^{-gamma}
};

struct EdgeExtract {
  EdgeWeights weights;
  Real t1, t2, dt;
  std::vector<int> n_list;
  Real mu1, nu1, mu2, nu2;  // fit coefficients at the stencil centre
  StencilDerivs mu, nu;     // extrapolated limits and their t-derivatives
  Real v1, v2, v1_xi, v2_xi, v1_xixi, v2_xixi;
  Real w1, w2, H2;
  /// max(|mu2|, |nu2|) n_max^{-1/3}: size of the leading correction at the
  /// largest n in the sweep.
  Real envelope;
  std::vector<RateEstimate> rate_estimates;
};

struct ExtractOptions {
  /// Throw RateMismatch when an observed exponent for n^{1/6} R_{n,i} is
  /// further than kEdgeExponent from 1/3.
  bool enforce_rate = true;
};

/// Requires >= 3 stencils with doubling n, all at the same (t1, t2, dt).
EdgeExtract extract_edge(const std::vector<EdgeStencil>& stencils, const ExtractOptions& options = {});

/// Samples every n in n_list and extracts.
EdgeExtract extract_edge(const EdgeWeights& weights, const Real& t1, const Real& t2, const std::vector<int>& n_list,
                         const PrecisionContext& ctx, const ExtractOptions& options = {});

/// H_II = v1 w1^2 + v2 w2^2 - (v1 + v2)^2 - t1 v1 - t2 v2.
Real hii_hamiltonian(const Real& v1, const Real& v2, const Real& w1, const Real& w2, const Real& t1, const Real& t2);

/// Exponent and contraction reports for mu1_hat and nu1_hat.
ReportList check_edge_rates(const EdgeExtract& extract);

/// The coupled PDEs for (mu1, nu1): per-n residuals must shrink with factor
/// in (0.6, 1.0) per doubling, the extrapolated residual must sit below the
/// envelope, and d_t2 mu1 = d_t1 nu1.
ReportList check_mu_nu_pde(const std::vector<EdgeStencil>& stencils, const EdgeExtract& extract);

/// v_ixixi - v_ixi^2 / (2 v_i) - 2 v_i (2 (v1 + v2) + t_i) for i = 1, 2; same
/// reporting pattern. Throws DegenerateResidue if v_i vanishes on a stencil.
ReportList check_pii_residual(const std::vector<EdgeStencil>& stencils, const EdgeExtract& extract);

/// (i) |sigma_hat(n) - H2| shrinking per doubling; (ii) the alpha_n deviation
/// decaying with exponent 1/2 and its sign; (iii) beta_n / n - 1/2 within
/// 2 (|v1| + |v2|) n^{-2/3} and a bounded beta_n remainder.
ReportList check_sigma_and_recurrence_asymptotics(const std::vector<EdgeStencil>& stencils,
                                                  const EdgeExtract& extract);

enum class HiiPdeForm {
  /// (d1H)(d22H + d12H)^2 + (d2H)(d11H + d12H)^2 = 4 (d1H)(d2H)(t1 d1H + t2 d2H - H).
  as_published,
  /// Same with -(d1H + d2H)^2 added inside the last bracket: the leading
  /// order of the sigma_n PDE under the scaling.
  with_gradient_term,
};

/// The H_II PDE evaluated on sigma_hat(n) for each n of the sweep, with H
/// taken as the finite-n proxy sigma_hat. Reports the normalized residual at
/// the largest n against the extraction envelope and its decrease along n.
ReportList check_hii_pde(const std::vector<EdgeStencil>& stencils, const EdgeExtract& extract, HiiPdeForm form);

/// Residual of the H_II PDE from derivatives of H at (t1, t2), normalized by
/// the largest of its three terms (0 when all vanish).
Real hii_pde_residual(const StencilDerivs& H, const Real& t1, const Real& t2, HiiPdeForm form);

/// n, t1, t2, mu1_hat, nu1_hat, sigma_hat, alpha_n, beta_n at each stencil
/// centre.
std::string edge_csv(const std::vector<EdgeStencil>& stencils);

}  // namespace jgl
