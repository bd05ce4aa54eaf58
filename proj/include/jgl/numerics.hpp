#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "jgl/real.hpp"

namespace jgl {

/// Guard bits added to the caller's precision inside special-function
/// evaluations.
inline constexpr long kGuardBits = 32;

/// Complementary error function, relative error below 2^{-bits+8}.
Real eval_erfc(const Real& x, const PrecisionContext& ctx);

/// A point or direction in the (s1, s2) plane.
struct Point2 {
  Real s1;
  Real s2;
};

using BivariateFn = std::function<Real(const Real& s1, const Real& s2)>;
using BivariateVecFn = std::function<std::vector<Real>(const Real& s1, const Real& s2)>;

/// Finite-difference estimate of a directional derivative.
///
/// `coarse` and `fine` are the plain central differences at steps h and h/2;
/// `value` is their Richardson combination (4 fine - coarse) / 3 and `error`
/// is |value - fine|.
struct FdEstimate {
  Real value;
  Real error;
  Real coarse;
  Real fine;
  Real step;
};

/// h = 2^{-bits/4} * max(1, |point|).
Real default_fd_step(const Point2& point, const PrecisionContext& ctx);

/// First (order 1) or second (order 2) derivative of f along `direction` at
/// `point`. Throws StepUnderflow when step < 2^{-bits/2}.
FdEstimate directional_diff(const BivariateFn& f, const Point2& point, const Point2& direction,
                            std::optional<Real> step, int order, const PrecisionContext& ctx);

/// Same as directional_diff for every component of a vector-valued f, sharing
/// the function evaluations.
std::vector<FdEstimate> directional_diff(const BivariateVecFn& f, const Point2& point,
                                         const Point2& direction, std::optional<Real> step,
                                         int order, const PrecisionContext& ctx);

/// Combines central differences at h and h/2 (error ~ h^2) into an O(h^4)
/// estimate.
FdEstimate richardson(Real coarse, Real fine, Real step);

}  // namespace jgl
