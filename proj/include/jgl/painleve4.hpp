#pragma once

// Finite-n coordinates (a_i, b_i) built from the residues, the Hamiltonian
// H_IV = sigma_n + n (s1 + s2), and pointwise checks of its Hamilton
// equations in x = (s1 + s2)/2 at fixed s = (s2 - s1)/2.

#include <optional>

#include "jgl/ortho.hpp"
#include "jgl/report.hpp"

namespace jgl {

namespace thresholds {
inline constexpr double kHamilton = 1e-15;
inline constexpr double kHamiltonian = 1e-25;
inline constexpr double kRecurrenceMap = 1e-18;
inline constexpr double kAShift = 1e-25;
inline constexpr double kRoundTrip = 1e-28;
}  // namespace thresholds

struct PIVState {
  Real x;
  Real s;
  Real a1, a2, b1, b2;
  int n = 0;
  Real H;
};

/// H_IV(a, b; x, s, n) =
///   -2(a1 b1 + a2 b2 + n)(a1 + a2) - (a1 b1^2 + a2 b2^2)
///   + 2((x - s) a1 b1 + (x + s) a2 b2 + n x).
Real piv_hamiltonian(const Real& a1, const Real& a2, const Real& b1, const Real& b2, const Real& x, const Real& s,
                     int n);

/// a_i = r_i^2 / (R_i (r_1 + r_2 + n)), b_i = R_i (r_1 + r_2 + n) / r_i.
/// Throws DegenerateResidue when r_{n,i} or R_{n,i} vanishes.
PIVState to_piv_state(const AuxQuantities& aux, const OrthoSystem& sys, int n);

/// Inverse map: R_i = a_i b_i^2 / (a1 b1 + a2 b2 + n), r_i = a_i b_i.
struct ResiduePair {
  Real R1, R2, r1, r2;
};
ResiduePair from_piv_state(const PIVState& state);

/// Right-hand sides of the four Hamilton equations for d/dx (a1, a2, b1, b2).
std::vector<Real> piv_rhs(const PIVState& state);

/// State consistency: round trip through the inverse map, H_IV against
/// sigma_n + n (s1 + s2), and a_i = R_{n-1,i} / 2. Needs n >= 1.
ReportList check_piv_state(const WeightParams& params, int n, const PrecisionContext& ctx);

/// Finite-difference d/dx of (a1, a2, b1, b2) against the Hamilton
/// equations.
ReportList check_hamilton_equations(const WeightParams& params, int n, const PrecisionContext& ctx,
                                    std::optional<Real> step = std::nullopt);

/// alpha_n and beta_n in terms of (a, b), and
/// alpha_{n-1} = a1 + a2 = -(1/2) d/dx ln h_{n-1}.
ReportList check_recurrence_maps(const WeightParams& params, int n, const PrecisionContext& ctx,
                                 std::optional<Real> step = std::nullopt);

}  // namespace jgl
