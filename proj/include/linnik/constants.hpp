#pragma once

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <map>

#include "linnik/real.hpp"

namespace linnik::constants {

// a(p), b(p): the two local polynomials, by the residue of p mod 4.
mpz_class a_of(uint64_t p);
mpz_class b_of(uint64_t p);

// Closed-form local exponential sum B(p, h); four cases on p mod 4 and p | h.
mpz_class local_B(uint64_t p, const mpz_class& h);

// Direct Gauss-sum evaluation of B(p, h) in complex doubles (p <= 200);
// imaginary part stays below 1e-6.
std::complex<double> local_B_oracle(uint64_t p, int64_t h);

struct LocalFactor {
  uint64_t p;
  mpz_class a;
  mpz_class b;
  mpq_class c_recip;  // 1/c(p)
};
LocalFactor local_factor(uint64_t p);

// Exact 1/c(p) from 1 + 1/c(p) = (1 + b/(p-1)^4) / (1 + a/(p-1)^4); p > 5.
mpq_class c_reciprocal(uint64_t p);

// (1 + 1/c(p)) / (1 + 1/(p-1)) - 1, exact; the c3 Euler factor minus one.
mpq_class epsilon_of(uint64_t p);

// Local product over p in {3, 5}: 0 if 3 does not divide h;
// 15(5 - 3(h/5))/32 if 3 | h, 5 does not divide h; 45/8 if 15 | h.
mpq_class kappa(const mpz_class& h);

struct EulerProductBound {
  UpperBound partial;  // exact-prefix partial product, upward-rounded
  UpperBound value;    // partial times certified tail
  uint64_t cutoff = 0;
};

// prod_{5<p<cutoff} (1 + a(p)/(p-1)^4), tail zeta(2)^3.1 * prod_{p<cutoff}(1-1/p^2)^3.1.
EulerProductBound c4_bound(uint64_t cutoff = 100000,
                           mpfr_prec_t prec = kDefaultPrec);

// prod over the first n_primes primes (p > 5) of (1 + eps(p)), tail via
// zeta(2)^7.44; cutoff at the n_primes-th prime.
EulerProductBound c3_bound(uint64_t n_primes = 1000000,
                           mpfr_prec_t prec = kDefaultPrec);

// (1 - 1/101)(1 - 1/107)(1 - 1/131), exact.
mpq_class c3prime_exact();
UpperBound c3prime(mpfr_prec_t prec = kDefaultPrec);

// Memoized accessors used by the pipeline.
const EulerProductBound& c3_cached(uint64_t n_primes, mpfr_prec_t prec);
const EulerProductBound& c4_cached(uint64_t cutoff, mpfr_prec_t prec);

// m1(x) = prod_{e <= x/2} (2^{2e} - 1); ratio m1/phi(m1) as an exact rational
// (it only depends on the primes dividing m1).
mpq_class m1_totient_ratio(unsigned x);
// true iff m1(x)/phi(m1(x)) <= e^gamma log(x/2), decided with certified
// directed rounding; x in [4, 60].
bool m1_ratio_check(unsigned x, mpfr_prec_t prec = kDefaultPrec);

// u(d) = e^gamma loglog d + 2.5064/loglog d evaluated at d = 2^e, as a
// certified lower bound (RNDD) or upper bound (RNDU).
Real u_at_pow2(const mpq_class& exponent, mpfr_prec_t prec, mpfr_rnd_t rnd);

// S(h) <= c4 * kappa(h) * prod_{p>5, p|h} (1 + 1/c(p)).
UpperBound S_upper(const mpz_class& h, const UpperBound& c4,
                   mpfr_prec_t prec = kDefaultPrec);

struct Interval {
  Real lo;
  Real hi;
  Interval(mpfr_prec_t prec = kDefaultPrec) : lo(prec), hi(prec) {}
};

// Two-sided truncated Euler product for S(h): exact local factors for
// 2 < p <= P0 and for every prime divisor of h, tail bracket from
// |B(p,h)| <= (p+1)^2 + 4p(p+1) for p not dividing h. P0 >= 100.
Interval S_truncated(const mpz_class& h, uint64_t P0,
                     mpfr_prec_t prec = kDefaultPrec);

// r_l(h): representations of h as sum_{j<=l} (2^{u_j} - 2^{v_j}) with
// exponents in [4, L]; exact enumeration, L <= 12.
std::map<int64_t, uint64_t> r_l_oracle(unsigned l, unsigned L);

}  // namespace linnik::constants
