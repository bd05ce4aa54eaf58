#pragma once

#include <cmath>

#include "jgl/real.hpp"

namespace jgl::test {

inline Real num(const char* text, long bits) { return Real::parse(text, Precision{bits}); }

/// |a - b| / max(1, |b|) as a double (exponent range is ample for tests).
inline double rel_diff(const Real& a, const Real& b) {
  const Precision p{std::max(a.precision(), b.precision())};
  return (abs(a - b) / max(Real(1.0, p), abs(b))).to_double();
}

}  // namespace jgl::test
