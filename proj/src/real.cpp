#include "linnik/real.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "linnik/common.hpp"

namespace linnik {

namespace {

// Truncated (not rounded) reference digits; true value lies in
// [str, str + 1e-64).
constexpr const char* kGammaDigits =
    "0.5772156649015328606065120900824024310421593359399235988057672348";
constexpr const char* kPiDigits =
    "3.1415926535897932384626433832795028841971693993751058209749445923";

Real bracketed_const(const char* digits, mpfr_prec_t prec, mpfr_rnd_t rnd) {
  Real r(prec);
  if (rnd == MPFR_RNDD || rnd == MPFR_RNDZ) {
    mpfr_set_str(r, digits, 10, MPFR_RNDD);
  } else {
    // Upper bound: add the truncation slack before rounding up.
    Real slack(prec);
    mpfr_set_str(r, digits, 10, MPFR_RNDU);
    mpfr_set_str(slack, "1e-64", 10, MPFR_RNDU);
    mpfr_add(r, r, slack, MPFR_RNDU);
  }
  return r;
}

}  // namespace

mpfr_prec_t prec_for_digits(unsigned digits) {
  // bits = digits * log2(10), plus guard bits.
  auto bits = static_cast<mpfr_prec_t>(digits * 3.3219280948873623 + 32);
  return std::max<mpfr_prec_t>(bits, kDefaultPrec);
}

mpq_class Real::to_rational() const {
  if (mpfr_zero_p(v_)) return mpq_class(0);
  if (!mpfr_number_p(v_)) throw internal_error("Real::to_rational on non-finite value");
  mpz_class mant;
  mpfr_exp_t e = mpfr_get_z_2exp(mant.get_mpz_t(), v_);
  mpq_class q(mant);
  if (e >= 0) {
    mpz_mul_2exp(q.get_num().get_mpz_t(), q.get_num().get_mpz_t(), e);
  } else {
    mpz_mul_2exp(q.get_den().get_mpz_t(), q.get_den().get_mpz_t(), -e);
  }
  q.canonicalize();
  return q;
}

std::string Real::str(int digits, mpfr_rnd_t rnd) const {
  char fmt[32];
  std::snprintf(fmt, sizeof fmt, "%%.%dR*g", digits);
  char* out = nullptr;
  if (mpfr_asprintf(&out, fmt, rnd, v_) < 0)
    throw internal_error("mpfr_asprintf failed");
  std::string s(out);
  mpfr_free_str(out);
  return s;
}

Real real_from(const mpq_class& q, mpfr_prec_t prec, mpfr_rnd_t rnd) {
  Real r(prec);
  mpfr_set_q(r, q.get_mpq_t(), rnd);
  return r;
}

Real real_from(const std::string& decimal, mpfr_prec_t prec, mpfr_rnd_t rnd) {
  Real r(prec);
  if (mpfr_set_str(r, decimal.c_str(), 10, rnd) != 0 && !mpfr_number_p(r))
    throw invalid_input("unparseable decimal: " + decimal);
  return r;
}

Real real_from(double x, mpfr_prec_t prec, mpfr_rnd_t rnd) {
  Real r(prec);
  mpfr_set_d(r, x, rnd);
  return r;
}

Real gamma_const(mpfr_prec_t prec, mpfr_rnd_t rnd) {
  return bracketed_const(kGammaDigits, prec, rnd);
}

Real pi_const(mpfr_prec_t prec, mpfr_rnd_t rnd) {
  return bracketed_const(kPiDigits, prec, rnd);
}

Real zeta2_const(mpfr_prec_t prec, mpfr_rnd_t rnd) {
  Real p = pi_const(prec, rnd);
  Real r(prec);
  mpfr_sqr(r, p, rnd);
  mpfr_div_ui(r, r, 6, rnd);
  return r;
}

}  // namespace linnik
