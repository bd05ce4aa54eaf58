#pragma once

// Value-semantic wrapper over an MPFR number plus the precision context that
// every numerical routine in the library takes.

#include <mpfr.h>

#include <algorithm>
#include <compare>
#include <concepts>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>

namespace jgl {

/// Significand precision in bits, carried explicitly so that constructors
/// taking a precision cannot be confused with constructors taking a value.
struct Precision {
  mpfr_prec_t bits;
};

class Real {
 public:
  Real() : Real(Precision{default_precision()}) {}
  explicit Real(Precision p) {
    mpfr_init2(v_, p.bits);
    mpfr_set_zero(v_, 1);
  }
  Real(double d) {  // NOLINT(google-explicit-constructor)
    mpfr_init2(v_, default_precision());
    mpfr_set_d(v_, d, MPFR_RNDN);
  }
  template <std::signed_integral I>
  Real(I i) {  // NOLINT(google-explicit-constructor)
    mpfr_init2(v_, default_precision());
    mpfr_set_si(v_, static_cast<long>(i), MPFR_RNDN);
  }
  Real(double d, Precision p) {
    mpfr_init2(v_, p.bits);
    mpfr_set_d(v_, d, MPFR_RNDN);
  }
  template <std::signed_integral I>
  Real(I i, Precision p) {
    mpfr_init2(v_, p.bits);
    mpfr_set_si(v_, static_cast<long>(i), MPFR_RNDN);
  }
  /// Rounds `other` to precision `p`.
  Real(const Real& other, Precision p) {
    mpfr_init2(v_, p.bits);
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }

  /// Parses a decimal string; throws std::invalid_argument on malformed input.
  static Real parse(std::string_view text, Precision p);
  static Real parse(std::string_view text) { return parse(text, Precision{default_precision()}); }

  Real(const Real& other) {
    mpfr_init2(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  Real(Real&& other) noexcept {
    *v_ = *other.v_;
    other.v_->_mpfr_d = nullptr;
  }
  Real& operator=(const Real& other) {
    if (this != &other) {
      if (is_moved_from()) mpfr_init2(v_, mpfr_get_prec(other.v_));
      else if (mpfr_get_prec(v_) != mpfr_get_prec(other.v_)) mpfr_set_prec(v_, mpfr_get_prec(other.v_));
      mpfr_set(v_, other.v_, MPFR_RNDN);
    }
    return *this;
  }
  Real& operator=(Real&& other) noexcept {
    if (this != &other) {
      if (!is_moved_from()) mpfr_clear(v_);
      *v_ = *other.v_;
      other.v_->_mpfr_d = nullptr;
    }
    return *this;
  }
  ~Real() {
    if (!is_moved_from()) mpfr_clear(v_);
  }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  mpfr_prec_t precision() const { return mpfr_get_prec(v_); }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  long to_long() const { return mpfr_get_si(v_, MPFR_RNDN); }
  /// Scientific notation with `digits` significant digits, e.g. "1.2500e+00".
  std::string to_string(int digits = 40) const;

  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }

  Real& operator+=(const Real& o) { mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator-=(const Real& o) { mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator*=(const Real& o) { mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator/=(const Real& o) { mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator*=(long o) { mpfr_mul_si(v_, v_, o, MPFR_RNDN); return *this; }
  Real& operator/=(long o) { mpfr_div_si(v_, v_, o, MPFR_RNDN); return *this; }

  Real operator-() const {
    Real r(Precision{precision()});
    mpfr_neg(r.v_, v_, MPFR_RNDN);
    return r;
  }

  /// Precision given to values constructed without an explicit precision.
  /// Thread-local; see PrecisionScope.
  static mpfr_prec_t default_precision();
  static void set_default_precision(mpfr_prec_t bits);

 private:
  bool is_moved_from() const { return v_->_mpfr_d == nullptr; }
  mpfr_t v_;
};

/// Sets the thread's default precision for the lifetime of the scope.
class PrecisionScope {
 public:
  explicit PrecisionScope(mpfr_prec_t bits) : saved_(Real::default_precision()) {
    Real::set_default_precision(bits);
  }
  ~PrecisionScope() { Real::set_default_precision(saved_); }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  mpfr_prec_t saved_;
};

namespace detail {
inline Precision max_prec(const Real& a, const Real& b) {
  return Precision{std::max(a.precision(), b.precision())};
}
}  // namespace detail

inline Real operator+(const Real& a, const Real& b) {
  Real r(detail::max_prec(a, b));
  mpfr_add(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}
inline Real operator-(const Real& a, const Real& b) {
  Real r(detail::max_prec(a, b));
  mpfr_sub(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}
inline Real operator*(const Real& a, const Real& b) {
  Real r(detail::max_prec(a, b));
  mpfr_mul(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}
inline Real operator/(const Real& a, const Real& b) {
  Real r(detail::max_prec(a, b));
  mpfr_div(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}

// Mixed operations with plain numbers keep the precision of the Real operand.
template <typename T>
concept Arithmetic = std::integral<T> || std::floating_point<T>;

template <Arithmetic T>
Real operator+(const Real& a, T b) { return a + Real(static_cast<double>(b), Precision{a.precision()}); }
template <Arithmetic T>
Real operator+(T a, const Real& b) { return b + a; }
template <Arithmetic T>
Real operator-(const Real& a, T b) { return a - Real(static_cast<double>(b), Precision{a.precision()}); }
template <Arithmetic T>
Real operator-(T a, const Real& b) { return Real(static_cast<double>(a), Precision{b.precision()}) - b; }
template <Arithmetic T>
Real operator*(const Real& a, T b) { return a * Real(static_cast<double>(b), Precision{a.precision()}); }
template <Arithmetic T>
Real operator*(T a, const Real& b) { return b * a; }
template <Arithmetic T>
Real operator/(const Real& a, T b) { return a / Real(static_cast<double>(b), Precision{a.precision()}); }
template <Arithmetic T>
Real operator/(T a, const Real& b) { return Real(static_cast<double>(a), Precision{b.precision()}) / b; }

inline bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.get(), b.get()) != 0; }
inline std::partial_ordering operator<=>(const Real& a, const Real& b) {
  if (mpfr_unordered_p(a.get(), b.get())) return std::partial_ordering::unordered;
  const int c = mpfr_cmp(a.get(), b.get());
  return c < 0 ? std::partial_ordering::less
               : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
}
template <Arithmetic T>
bool operator==(const Real& a, T b) { return mpfr_cmp_d(a.get(), static_cast<double>(b)) == 0; }
template <Arithmetic T>
std::partial_ordering operator<=>(const Real& a, T b) {
  const int c = mpfr_cmp_d(a.get(), static_cast<double>(b));
  return c < 0 ? std::partial_ordering::less
               : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
}

Real abs(const Real& x);
Real sqrt(const Real& x);
Real cbrt(const Real& x);
Real exp(const Real& x);
Real log(const Real& x);
Real pow(const Real& x, const Real& y);
Real pow(const Real& x, long k);
Real square(const Real& x);
Real max(const Real& a, const Real& b);
Real min(const Real& a, const Real& b);
/// x * 2^k, exact.
Real ldexp(const Real& x, long k);
Real pi(Precision p);
inline Real pi() { return pi(Precision{Real::default_precision()}); }
/// 2^k as an exact value at precision p.
Real pow2(long k, Precision p);

std::ostream& operator<<(std::ostream& os, const Real& x);

/// Precision policy shared by every operation: the significand width and
/// the relative threshold used when two runs at different precisions are
/// compared.
class PrecisionContext {
 public:
  explicit PrecisionContext(long bits = 128, double agree_tol = 1e-20);

  long bits() const { return bits_; }
  double agree_tol() const { return agree_tol_; }
  Precision precision() const { return Precision{bits_}; }
  /// Same agreement threshold, different width.
  PrecisionContext with_bits(long bits) const { return PrecisionContext(bits, agree_tol_); }
  PrecisionContext doubled() const { return with_bits(2 * bits_); }

 private:
  long bits_;
  double agree_tol_;
};

}  // namespace jgl
