#include "jgl/real.hpp"

#include <cstdio>
#include <memory>
#include <stdexcept>

namespace jgl {

namespace {
thread_local mpfr_prec_t g_default_precision = 128;
}

mpfr_prec_t Real::default_precision() { return g_default_precision; }
void Real::set_default_precision(mpfr_prec_t bits) { g_default_precision = bits; }

Real Real::parse(std::string_view text, Precision p) {
  Real r(p);
  const std::string s(text);
  char* end = nullptr;
  if (!s.empty()) mpfr_strtofr(r.get(), s.c_str(), &end, 10, MPFR_RNDN);
  if (s.empty() || end == s.c_str() || *end != '\0') {
    throw std::invalid_argument("not a real number: '" + s + "'");
  }
  return r;
}

std::string Real::to_string(int digits) const {
  if (mpfr_nan_p(v_)) return "nan";
  if (mpfr_inf_p(v_)) return mpfr_sgn(v_) > 0 ? "inf" : "-inf";
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.*Re", digits - 1, v_);
  std::string out(buf);
  mpfr_free_str(buf);
  return out;
}

Real abs(const Real& x) {
  Real r(Precision{x.precision()});
  mpfr_abs(r.get(), x.get(), MPFR_RNDN);
  return r;
}
Real sqrt(const Real& x) {
  Real r(Precision{x.precision()});
  mpfr_sqrt(r.get(), x.get(), MPFR_RNDN);
  return r;
}
Real cbrt(const Real& x) {
  Real r(Precision{x.precision()});
  mpfr_cbrt(r.get(), x.get(), MPFR_RNDN);
  return r;
}
Real exp(const Real& x) {
  Real r(Precision{x.precision()});
  mpfr_exp(r.get(), x.get(), MPFR_RNDN);
  return r;
}
Real log(const Real& x) {
  Real r(Precision{x.precision()});
  mpfr_log(r.get(), x.get(), MPFR_RNDN);
  return r;
}
Real pow(const Real& x, const Real& y) {
  Real r(detail::max_prec(x, y));
  mpfr_pow(r.get(), x.get(), y.get(), MPFR_RNDN);
  return r;
}
Real pow(const Real& x, long k) {
  Real r(Precision{x.precision()});
  mpfr_pow_si(r.get(), x.get(), k, MPFR_RNDN);
  return r;
}
Real square(const Real& x) {
  Real r(Precision{x.precision()});
  mpfr_sqr(r.get(), x.get(), MPFR_RNDN);
  return r;
}
Real max(const Real& a, const Real& b) { return a < b ? b : a; }
Real min(const Real& a, const Real& b) { return b < a ? b : a; }
Real ldexp(const Real& x, long k) {
  Real r(Precision{x.precision()});
  mpfr_mul_2si(r.get(), x.get(), k, MPFR_RNDN);
  return r;
}
Real pi(Precision p) {
  Real r(p);
  mpfr_const_pi(r.get(), MPFR_RNDN);
  return r;
}
Real pow2(long k, Precision p) {
  Real r(p);
  mpfr_set_ui_2exp(r.get(), 1, k, MPFR_RNDN);
  return r;
}

std::ostream& operator<<(std::ostream& os, const Real& x) {
  const auto digits = static_cast<int>(os.precision() > 0 ? os.precision() : 6);
  return os << x.to_string(digits);
}

PrecisionContext::PrecisionContext(long bits, double agree_tol) : bits_(bits), agree_tol_(agree_tol) {
  if (bits < 64) throw std::invalid_argument("PrecisionContext: bits must be >= 64");
  if (!(agree_tol > 0.0 && agree_tol < 1.0)) {
    throw std::invalid_argument("PrecisionContext: agree_tol must lie in (0, 1)");
  }
}

}  // namespace jgl
