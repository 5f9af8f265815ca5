#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <string>

namespace linnik {

// Default working precision. 192 bits is about 57 decimal digits; every
// certified constant in this toolkit is produced at or above this precision
// with an explicit rounding direction on each operation.
inline constexpr mpfr_prec_t kDefaultPrec = 192;

mpfr_prec_t prec_for_digits(unsigned digits);

// Thin RAII wrapper over mpfr_t. It converts implicitly to mpfr_ptr /
// mpfr_srcptr so the mpfr_* C API is used directly at call sites; bounds
// are only as good as their rounding modes, so there are no operator
// overloads that would hide them.
class Real {
 public:
  explicit Real(mpfr_prec_t prec = kDefaultPrec) {
    mpfr_init2(v_, prec);
    mpfr_set_nan(v_);
  }
  Real(const Real& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  Real(Real&& o) noexcept {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_swap(v_, o.v_);
  }
  Real& operator=(const Real& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  Real& operator=(Real&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~Real() { mpfr_clear(v_); }

  operator mpfr_ptr() { return v_; }
  operator mpfr_srcptr() const { return v_; }
  // For the mpfr_* macros, which bypass implicit conversion.
  mpfr_srcptr mp() const { return v_; }
  int sgn() const { return mpfr_sgn(v_); }

  mpfr_prec_t prec() const { return mpfr_get_prec(v_); }
  double to_double(mpfr_rnd_t rnd) const { return mpfr_get_d(v_, rnd); }
  // Exact dyadic value as a rational; no rounding involved.
  mpq_class to_rational() const;
  // Decimal rendering with an explicit rounding direction. Certified upper
  // bounds must be printed with MPFR_RNDU to stay certified in print.
  std::string str(int digits, mpfr_rnd_t rnd) const;

 private:
  mpfr_t v_;
};

Real real_from(const mpq_class& q, mpfr_prec_t prec, mpfr_rnd_t rnd);
Real real_from(const std::string& decimal, mpfr_prec_t prec, mpfr_rnd_t rnd);
Real real_from(double x, mpfr_prec_t prec, mpfr_rnd_t rnd);

// Reference constants, hard-coded to 64 truncated decimal places. The
// truncation slack (< 1e-64) is added on the upward-rounded side, so
// gamma_const(p, MPFR_RNDD) <= gamma <= gamma_const(p, MPFR_RNDU).
Real gamma_const(mpfr_prec_t prec, mpfr_rnd_t rnd);
Real pi_const(mpfr_prec_t prec, mpfr_rnd_t rnd);
Real zeta2_const(mpfr_prec_t prec, mpfr_rnd_t rnd);  // pi^2 / 6

// A certified upper bound: true quantity <= value. Directed rounding slack
// is already folded into value; error_budget records any additional slack
// the derivation added on top of the exact quantity it bounds.
struct UpperBound {
  Real value;
  Real error_budget;
  std::string note;

  explicit UpperBound(mpfr_prec_t prec = kDefaultPrec)
      : value(prec), error_budget(prec) {
    mpfr_set_zero(error_budget, 1);
  }
  double d() const { return value.to_double(MPFR_RNDU); }
  std::string str(int digits = 50) const { return value.str(digits, MPFR_RNDU); }
};

}  // namespace linnik
