#include "jgl/report.hpp"

#include <algorithm>

namespace jgl {

ResidualReport ResidualReport::make(std::string label, int n, const WeightParams& params, Real lhs, Real rhs,
                                    double threshold, std::optional<Real> fd_step,
                                    const std::optional<Real>& scale) {
  ResidualReport r;
  r.label = std::move(label);
  r.n = n;
  r.params = params;
  r.abs_residual = abs(lhs - rhs);
  Real denom = max(Real(1.0, Precision{lhs.precision()}), max(abs(lhs), abs(rhs)));
  if (scale) denom = max(denom, abs(*scale));
  r.rel_residual = r.abs_residual / denom;
  r.lhs = std::move(lhs);
  r.rhs = std::move(rhs);
  r.fd_step = std::move(fd_step);
  r.threshold = threshold;
  r.pass = r.rel_residual.is_finite() && r.rel_residual < threshold;
  return r;
}

ResidualReport ResidualReport::at_least(std::string label, int n, const WeightParams& params, Real value,
                                        Real bound) {
  ResidualReport r;
  r.label = std::move(label);
  r.n = n;
  r.params = params;
  const Precision p{value.precision()};
  r.abs_residual = max(Real(0.0, p), bound - value);
  r.rel_residual = r.abs_residual / max(Real(1.0, p), abs(bound));
  r.pass = value >= bound;  // false for NaN
  r.lhs = std::move(value);
  r.rhs = std::move(bound);
  r.threshold = 0.0;
  return r;
}

ResidualReport ResidualReport::at_most(std::string label, int n, const WeightParams& params, Real value,
                                       Real bound) {
  ResidualReport r;
  r.label = std::move(label);
  r.n = n;
  r.params = params;
  const Precision p{value.precision()};
  r.abs_residual = max(Real(0.0, p), value - bound);
  r.rel_residual = r.abs_residual / max(Real(1.0, p), abs(bound));
  r.pass = value <= bound;
  r.lhs = std::move(value);
  r.rhs = std::move(bound);
  r.threshold = 0.0;
  return r;
}

bool all_pass(const ReportList& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const ResidualReport& r) { return r.pass; });
}

void append(ReportList& into, ReportList more) {
  into.insert(into.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
}

}  // namespace jgl
