#pragma once

#include <functional>
#include <vector>

#include "jgl/real.hpp"

namespace jgl {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<Real> nodes;
  std::vector<Real> weights;
};

/// m-point rule accurate to the precision of `ctx` (Newton iteration on P_m).
GaussLegendreRule gauss_legendre(int m, const PrecisionContext& ctx);

using UnivariateFn = std::function<Real(const Real&)>;

/// Composite rule: [a, b] split into `panels` equal panels.
Real integrate_panels(const UnivariateFn& f, const Real& a, const Real& b, int panels,
                      const GaussLegendreRule& rule);

/// Composite Gauss-Legendre with panel doubling until two successive levels
/// agree to relative 2^{-(bits-16)}. Throws QuadratureNotConverged.
Real integrate(const UnivariateFn& f, const Real& a, const Real& b, const PrecisionContext& ctx,
               int nodes_per_panel = 32, int max_levels = 10);

}  // namespace jgl
