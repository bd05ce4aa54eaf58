#pragma once

// Coupled Painleve II Hamiltonian system in xi = t1 at fixed eta = t2 - t1:
//   v_i' = 2 v_i w_i,  w_i' = 2 (v1 + v2) + t_i - w_i^2,
// integrated by an adaptive Dormand-Prince 5(4) pair at working precision.

#include <array>
#include <string>
#include <vector>

#include "jgl/report.hpp"
#include "jgl/softedge.hpp"

namespace jgl {

struct PIIState {
  Real xi;
  Real eta;
  Real v1, v2, w1, w2;
  Real H2;

  /// Builds a state and fills H2.
  static PIIState make(Real xi, Real eta, Real v1, Real v2, Real w1, Real w2);
};

/// (dv1, dv2, dw1, dw2) at the state, with t1 = xi and t2 = xi + eta.
std::array<Real, 4> pii_rhs(const PIIState& state);

struct PIITrajectory {
  /// States at the requested sample points, in integration order; the
  /// first entry is the initial state.
  std::vector<PIIState> samples;
  /// State after every accepted step.
  std::vector<PIIState> steps;
  /// max over accepted steps of |H2(xi) - Q(xi)| where Q' = -(v1 + v2),
  /// Q(xi0) = H2(xi0) is integrated alongside the system.
  Real max_flow_defect;
  long accepted = 0;
  long rejected = 0;
};

/// Integrates from initial.xi to xi_end (either direction), keeping the
/// estimated local error of each step below tol * max(1, |y_i|). Steps land
/// exactly on every sample point between the two ends. Throws StepCollapse
/// when the step size underflows.
PIITrajectory integrate_pii(const PIIState& initial, const Real& xi_end, const Real& tol, const PrecisionContext& ctx,
                            const std::vector<Real>& sample_points = {});

/// Integrator checks on [initial.xi, xi_end] with 8 equispaced sample points:
/// the flow identity defect at tol (bound 10 tol); the max-norm gap between
/// the trajectories at tol and tol/10 on the samples (bound 10 tol); the
/// defect reduction from tol to tol/10 (at least 8); and exact invariance of
/// v1 = v2 = 0 starting from the same (xi, eta, w1, w2).
ReportList check_pii_integrator(const PIIState& initial, const Real& xi_end, const Real& tol,
                                const PrecisionContext& ctx);

/// Initial state at xi0 = t1 from an extraction.
PIIState pii_state_from_extract(const EdgeExtract& extract);

/// Integrates from the extraction at xi0 to each fresh extraction's t1
/// (same eta) and reports the largest deviation in (v1, v2, H2), judged
/// against the envelope of `extract`.
ResidualReport match_against(const EdgeExtract& extract, const std::vector<EdgeExtract>& fresh, const Real& tol,
                             const PrecisionContext& ctx);

/// Samples fresh extractions at t1 = xi0 - xi_span and xi0 + xi_span with
/// the same n_list and eta, then calls match_against. xi_span = 0 compares
/// the extraction with itself.
ResidualReport match_finite_n(const EdgeExtract& extract, const Real& xi_span, const PrecisionContext& ctx,
                              const Real& tol);

/// xi,v1,v2,w1,w2,H2 with a header row.
std::string trajectory_csv(const std::vector<PIIState>& states);

}  // namespace jgl
