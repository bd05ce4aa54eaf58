#pragma once

#include <stdexcept>
#include <string>

namespace jgl {

/// Base of every failure raised by the library. The CLI maps subclasses to
/// exit codes; everything else treats them as ordinary exceptions.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define JGL_DEFINE_ERROR(Name)                                 \
  class Name : public Error {                                  \
   public:                                                     \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

JGL_DEFINE_ERROR(InvalidParams);
JGL_DEFINE_ERROR(StepUnderflow);
JGL_DEFINE_ERROR(PrecisionExhausted);
JGL_DEFINE_ERROR(NotPositiveDefinite);
JGL_DEFINE_ERROR(QuadratureNotConverged);
JGL_DEFINE_ERROR(PoleHit);
JGL_DEFINE_ERROR(DegenerateResidue);
JGL_DEFINE_ERROR(OrderViolation);
JGL_DEFINE_ERROR(RateMismatch);
JGL_DEFINE_ERROR(StepCollapse);
JGL_DEFINE_ERROR(ConfigInvalid);

#undef JGL_DEFINE_ERROR

}  // namespace jgl
