#pragma once

#include <optional>
#include <string>
#include <vector>

#include "jgl/real.hpp"
#include "jgl/weight.hpp"

namespace jgl {

/// One evaluated identity: both sides, their residual and the threshold the
/// residual is judged against.
///
/// abs_residual = |lhs - rhs| and
/// rel_residual = abs_residual / max(1, |lhs|, |rhs|, scale), where `scale`
/// is the largest intermediate term for checks whose two sides are sums of
/// much larger terms (0 otherwise).
struct ResidualReport {
  std::string label;
  int n = 0;
  WeightParams params;
  Real lhs;
  Real rhs;
  Real abs_residual;
  Real rel_residual;
  std::optional<Real> fd_step;
  double threshold = 0.0;
  bool pass = false;

  static ResidualReport make(std::string label, int n, const WeightParams& params, Real lhs, Real rhs,
                             double threshold, std::optional<Real> fd_step = std::nullopt,
                             const std::optional<Real>& scale = std::nullopt);

  /// One-sided check value >= bound. rel_residual is the relative shortfall
  /// max(0, bound - value) / max(1, |bound|); threshold is 0 and pass means
  /// no shortfall.
  static ResidualReport at_least(std::string label, int n, const WeightParams& params, Real value, Real bound);
  /// value <= bound, reported the same way.
  static ResidualReport at_most(std::string label, int n, const WeightParams& params, Real value, Real bound);
};

using ReportList = std::vector<ResidualReport>;

bool all_pass(const ReportList& reports);
void append(ReportList& into, ReportList more);

}  // namespace jgl
