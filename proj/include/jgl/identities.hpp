#pragma once

// Finite-n verification harness. Each check evaluates both sides of an
// identity from independent primitives and returns ResidualReports.

#include <cstdint>
#include <optional>
#include <vector>

#include "jgl/ortho.hpp"
#include "jgl/report.hpp"

namespace jgl {

namespace thresholds {
inline constexpr double kDifferenceSystem = 1e-30;
inline constexpr double kSigmaRoutes = 1e-28;
inline constexpr double kChristoffelDarboux = 1e-25;
inline constexpr double kLadder = 1e-25;
inline constexpr double kFirstDerivative = 1e-18;
/// Observed finite-difference order must lie in (2 - kOrder, 2 + kOrder).
inline constexpr double kOrder = 0.2;
inline constexpr double kSecondOrder = 1e-12;
}  // namespace thresholds

/// Rebuilds the pipeline at (s1, s2) without the precision cross-check.
OrthoSystem rebuild_at(const WeightParams& params, const Real& s1, const Real& s2, int n_max,
                       const PrecisionContext& ctx);

/// Per n in [n_lo, n_hi]: beta_n R_{n,i} R_{n-1,i} = r_{n,i}^2,
/// r_{n+1,i} + r_{n,i} = (s_i - alpha_n) R_{n,i}, alpha_n and beta_n from the
/// residues, the closed form of sum_{j<n} (R_{j,1} + R_{j,2}), and agreement
/// of the three sigma_n routes. Needs sys.n_max >= n_hi + 1.
ReportList check_difference_system(const OrthoSystem& sys, int n_lo, int n_hi, const PrecisionContext& ctx);

/// sum_{j<n} P_j(x) P_j(y) / h_j against the Christoffel-Darboux kernel at
/// `samples` seeded random pairs x != y in [-3, 3].
ReportList check_christoffel_darboux(const OrthoSystem& sys, int n_lo, int n_hi, int samples,
                                     std::uint64_t seed, const PrecisionContext& ctx);

/// (S1): B_{n+1}(z) + B_n(z) = (z - alpha_n) A_n(z) - 2z and
/// (S2'): B_n(z)^2 + 2z B_n(z) + sum_{j<n} A_j(z) = beta_n A_n(z) A_{n-1}(z).
/// Throws PoleHit when a sample is a jump location. Needs sys.n_max >= n + 1.
ReportList check_ladder_compatibility(const OrthoSystem& sys, int n, const std::vector<Real>& z_samples,
                                      const PrecisionContext& ctx);

/// d_{s_i} ln h_n = -R_{n,i}, d_{s_i} p(n) = r_{n,i},
/// d_{s_i} alpha_n = r_{n,i} - r_{n+1,i}, d_{s_i} beta_n = beta_n (R_{n-1,i} - R_{n,i}),
/// d_{s2} r_{n,1} = d_{s1} r_{n,2}; plus the observed order of the plain
/// central differences for each relation.
ReportList check_derivative_relations(const WeightParams& params, int n, const PrecisionContext& ctx,
                                      std::optional<Real> step = std::nullopt);

/// d_{s_i}(R_{n,1} + R_{n,2}) = 4 r_{n,i} + (R_{n,1} + R_{n,2} - 2 s_i) R_{n,i} and
/// d_{s_i}(r_{n,1} + r_{n,2}) = 2 r_{n,i}^2 / R_{n,i} - (n + r_{n,1} + r_{n,2}) R_{n,i}.
/// Throws DegenerateResidue when R_{n,i} vanishes with B_i != 0.
ReportList check_riccati(const WeightParams& params, int n, const PrecisionContext& ctx,
                         std::optional<Real> step = std::nullopt);

/// The pair of second-order PDEs in (s1, s2) satisfied by (R_{n,1}, R_{n,2}).
ReportList check_coupled_pde_R(const WeightParams& params, int n, const PrecisionContext& ctx,
                               std::optional<Real> step = std::nullopt);

/// With B2 = 0 (relaxed), R_n = R_{n,1} satisfies
/// R'' = R'^2 / (2R) + 3/2 R^3 - 4 s1 R^2 + 2 (s1^2 - 2n - 1) R.
ResidualReport check_single_jump_ode(const WeightParams& params, int n, const PrecisionContext& ctx,
                                     std::optional<Real> step = std::nullopt);

/// ((2 s1 d1 sigma + 2 s2 d2 sigma - 2 sigma)^2 - D1 - D2)^2 = 4 D1 D2 with
/// D_i = (d_ii sigma + d_12 sigma)^2 + 4 (d_i sigma)^2 (d1 sigma + d2 sigma + 2n),
/// normalized by the square of the largest of the three inner terms.
ResidualReport check_sigma_pde(const WeightParams& params, int n, const PrecisionContext& ctx,
                               std::optional<Real> step = std::nullopt);

}  // namespace jgl
