#pragma once

#include <vector>

#include "jgl/real.hpp"

namespace jgl {

/// w(x) = e^{-x^2} (A + B1 theta(x - s1) + B2 theta(x - s2)).
///
/// Strict mode enforces s1 < s2, B1 B2 != 0 and nonnegativity of the weight
/// on each of the three intervals. Relaxed mode drops the B1 B2 != 0
/// requirement (single-jump and pure-Gaussian limits) and accepts s1 > s2,
/// which describes the same weight with the jump labels exchanged.
struct WeightParams {
  Real A;
  Real B1;
  Real B2;
  Real s1;
  Real s2;
  bool strict = true;

  static WeightParams make(double A, double B1, double B2, double s1, double s2, bool strict = true);

  /// Throws InvalidParams.
  void validate() const;
  WeightParams with_endpoints(Real new_s1, Real new_s2) const;
  /// Parameters of x -> w(-x): moments pick up a factor (-1)^k.
  WeightParams mirrored() const;
  /// Same weight with the labels of the two jumps exchanged (relaxed mode).
  WeightParams swapped() const;
};

struct MomentTable {
  WeightParams params;
  int k_max;
  std::vector<Real> moments;  // m_0 .. m_{k_max}
};

/// I_k(s) = int_s^inf x^k e^{-x^2} dx.
Real incomplete_moment(int k, const Real& s, const PrecisionContext& ctx);

/// int_{-inf}^{inf} x^k e^{-x^2} dx.
Real gaussian_moment(int k, const PrecisionContext& ctx);

/// m_k = int x^k w(x) dx = A G_k + B1 I_k(s1) + B2 I_k(s2).
Real moment(int k, const WeightParams& params, const PrecisionContext& ctx);

/// m_0 .. m_{k_max} in one pass.
MomentTable moment_table(const WeightParams& params, int k_max, const PrecisionContext& ctx);

/// C_n = (2 pi)^{n/2} 2^{-n^2/2} prod_{k=1}^{n-1} k!.
Real partition_constant(int n, const PrecisionContext& ctx);

}  // namespace jgl
