#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "linnik/common.hpp"
#include "linnik/constants.hpp"
#include "linnik/modmath.hpp"

using namespace linnik;
using namespace linnik::constants;

TEST_CASE("reference constants bracket the mpfr built-ins") {
  // Independent cross-check of the hard-coded digit strings.
  Real g(256);
  mpfr_const_euler(g, MPFR_RNDN);
  CHECK(mpfr_cmp(gamma_const(256, MPFR_RNDD), g) <= 0);
  CHECK(mpfr_cmp(gamma_const(256, MPFR_RNDU), g) >= 0);
  Real p(256);
  mpfr_const_pi(p, MPFR_RNDN);
  CHECK(mpfr_cmp(pi_const(256, MPFR_RNDD), p) <= 0);
  CHECK(mpfr_cmp(pi_const(256, MPFR_RNDU), p) >= 0);
  // bracket width stays below 1e-60
  Real w(256);
  mpfr_sub(w, gamma_const(256, MPFR_RNDU), gamma_const(256, MPFR_RNDD),
           MPFR_RNDU);
  Real cap = real_from(std::string("1e-60"), 256, MPFR_RNDU);
  CHECK(mpfr_cmp(w, cap) < 0);
}

TEST_CASE("a, b and the closed-form local sum") {
  CHECK(a_of(3) == -16);
  CHECK(a_of(5) == 64);
  CHECK(a_of(11) == -144);
  CHECK(b_of(5) == 224);
  CHECK(b_of(11) == 1440);

  CHECK(local_B(3, mpz_class(1)) == -16);
  CHECK(local_B(5, mpz_class(15)) == 224);
  CHECK(local_B(5, mpz_class(3)) == 64);   // (3/5) = -1
  CHECK(local_B(7, mpz_class(7)) == 384);  // (p-1)(p+1)^2
  // a(p) is the p-not-dividing-h maximum of B(p, h)
  for (uint64_t p : {3ull, 5ull, 13ull, 17ull}) {
    for (int h = 1; h < 30; h++) {
      if (h % p == 0) continue;
      CHECK(local_B(p, mpz_class(h)) <= a_of(p));
    }
  }
}

TEST_CASE("closed form matches the Gauss-sum oracle") {
  for (uint64_t p : modmath::primes_up_to(31)) {
    if (p == 2) continue;
    for (int64_t h = -20; h <= 20; h++) {
      auto oracle = local_B_oracle(p, h);
      CHECK(std::abs(oracle.imag()) < 1e-6);
      CHECK(std::abs(oracle.real() - local_B(p, mpz_class(h)).get_d()) < 1e-6);
    }
  }
  CHECK(std::abs(local_B_oracle(3, 1).real() + 16.0) < 1e-6);
  CHECK(std::abs(local_B_oracle(5, 5).real() - 224.0) < 1e-6);
  CHECK(std::abs(local_B_oracle(7, 7).real() - 384.0) < 1e-6);
}

TEST_CASE("c reciprocal") {
  CHECK(c_reciprocal(7) == mpq_class(4, 11));
  CHECK(c_reciprocal(11) == mpq_class(9, 56));
  CHECK_THROWS_AS(c_reciprocal(5), invalid_input);
  for (uint64_t p : modmath::primes_up_to(1000)) {
    if (p <= 5) continue;
    // c(p) < p - 1, i.e. 1/c(p) > 1/(p-1)
    CHECK(c_reciprocal(p) > mpq_class(1, p - 1));
    // 1/c(p) <= 4.1/p
    CHECK(c_reciprocal(p) <= mpq_class(41, 10 * p));
  }
}

TEST_CASE("kappa piecewise and product identity") {
  CHECK(kappa(mpz_class(1)) == 0);
  CHECK(kappa(mpz_class(15)) == mpq_class(45, 8));
  CHECK(kappa(mpz_class(3)) == mpq_class(15, 4));
  CHECK(kappa(mpz_class(21)) == mpq_class(15, 16));
  CHECK_THROWS_AS(kappa(mpz_class(0)), invalid_input);
  for (int h = 1; h <= 200; h++) {
    mpq_class prod(local_B(3, mpz_class(h)) + 16, 16);
    prod *= mpq_class(local_B(5, mpz_class(h)) + 256, 256);
    prod.canonicalize();
    CHECK(kappa(mpz_class(h)) == prod);
  }
  // negative h follows the same cases
  CHECK(kappa(mpz_class(-15)) == mpq_class(45, 8));
  CHECK(kappa(mpz_class(-1)) == 0);
}

TEST_CASE("c4 bound") {
  auto c4 = c4_cached(100000, kDefaultPrec);
  Real t1 = real_from(std::string("0.97425"), kDefaultPrec, MPFR_RNDD);
  CHECK(mpfr_cmp(c4.partial.value, t1) <= 0);
  Real t2 = real_from(std::string("0.9743"), kDefaultPrec, MPFR_RNDD);
  CHECK(mpfr_cmp(c4.value.value, t2) <= 0);
  CHECK(mpfr_cmp(c4.value.value, c4.partial.value) > 0);  // tail exceeds 1
  // longer exact prefix tightens the certified bound
  auto c4b = c4_bound(1000000, kDefaultPrec);
  CHECK(mpfr_cmp(c4b.value.value, c4.value.value) <= 0);
  CHECK_THROWS_AS(c4_bound(50000), invalid_input);
}

TEST_CASE("c3 bound") {
  auto c3 = c3_cached(1000000, kDefaultPrec);
  CHECK(c3.cutoff == 15485863);
  Real t1 = real_from(std::string("1.390399"), kDefaultPrec, MPFR_RNDD);
  CHECK(mpfr_cmp(c3.partial.value, t1) <= 0);
  Real t2 = real_from(std::string("1.3904"), kDefaultPrec, MPFR_RNDD);
  CHECK(mpfr_cmp(c3.value.value, t2) <= 0);
  CHECK_THROWS_AS(c3_bound(1000), invalid_input);
}

TEST_CASE("c3prime") {
  CHECK(c3prime_exact() == mpq_class(1378000, 1415717));
  CHECK(c3prime_exact() < mpq_class(97336, 100000));
  CHECK(c3prime_exact() > mpq_class(97, 100));
  CHECK(modmath::mult_order2_u64(101) > 99);
  CHECK(modmath::mult_order2_u64(107) > 99);
  CHECK(modmath::mult_order2_u64(131) > 99);
}

TEST_CASE("precision bump never raises a certified bound") {
  auto lo = c4_bound(100000, 192);
  auto hi = c4_bound(100000, 320);
  CHECK(mpfr_cmp(hi.value.value, lo.value.value) <= 0);
  // and never by more than the recorded budget in the other direction
  Real slack(320);
  mpfr_sub(slack, lo.value.value, hi.value.value, MPFR_RNDU);
  CHECK(slack.sgn() >= 0);
}

TEST_CASE("m1 totient ratio inequality") {
  CHECK(m1_ratio_check(37));
  CHECK(m1_ratio_check(50));
  CHECK(m1_ratio_check(60));
  CHECK_THROWS_AS(m1_ratio_check(61), budget_exceeded);
  CHECK_THROWS_AS(m1_ratio_check(3), budget_exceeded);
  // ratio only grows with x (more primes divide m1)
  CHECK(m1_totient_ratio(40) >= m1_totient_ratio(38));

  // x = 40 chain: m1-ratio <= 2 m1/phi(2 m1) <= u(2^(1.06 (x/2)^2)).
  mpq_class ratio = m1_totient_ratio(40);
  Real u_lo = u_at_pow2(mpq_class(424), kDefaultPrec, MPFR_RNDD);
  mpq_class twice = 2 * ratio;
  CHECK(mpfr_cmp_q(u_lo, twice.get_mpq_t()) >= 0);
  CHECK(mpfr_cmp_q(u_lo, ratio.get_mpq_t()) >= 0);
}

TEST_CASE("S upper bound") {
  auto c4 = c4_cached(100000, kDefaultPrec);

  auto z = S_upper(mpz_class(1) << 20, c4.value);
  CHECK(z.value.sgn() == 0);  // 3 does not divide 2^20

  auto s15 = S_upper(mpz_class(15), c4.value);
  mpq_class expect15 = c4.value.value.to_rational() * mpq_class(45, 8);
  CHECK(s15.value.to_rational() >= expect15);
  CHECK(s15.value.to_rational() <= expect15 * mpq_class(1000001, 1000000));

  // S_upper(21) = c4 * kappa(21) * (1 + 1/c(7)) = c4 * (15/16) * (15/11)
  auto s21 = S_upper(mpz_class(21), c4.value);
  mpq_class expect21 = c4.value.value.to_rational() * mpq_class(225, 176);
  CHECK(s21.value.to_rational() >= expect21);
  CHECK(s21.value.to_rational() <= expect21 * mpq_class(1000001, 1000000));

  CHECK_THROWS_AS(S_upper(mpz_class(0), c4.value), invalid_input);
}

TEST_CASE("S truncated") {
  auto c4 = c4_cached(100000, kDefaultPrec);
  // h = 1: the p = 3 factor annihilates the product
  auto z = S_truncated(mpz_class(1), 1000);
  CHECK(z.lo.sgn() == 0);
  CHECK(z.hi.sgn() == 0);
  for (long h : {15L, 3L, 21L, 45L}) {
    auto tr = S_truncated(mpz_class(h), 1000);
    auto up = S_upper(mpz_class(h), c4.value);
    CAPTURE(h);
    CHECK(mpfr_cmp(tr.lo, tr.hi) <= 0);
    CHECK(tr.lo.sgn() >= 0);
    // the certified upper bound sits above the truncated interval's floor
    CHECK(mpfr_cmp(tr.lo, up.value) <= 0);
  }
  // deeper truncation narrows the interval; both brackets overlap and stay
  // below the certified bound
  {
    auto wide = S_truncated(mpz_class(15), 1000);
    auto deep = S_truncated(mpz_class(15), 100000);
    auto up = S_upper(mpz_class(15), c4.value);
    Real ww(kDefaultPrec), dw(kDefaultPrec);
    mpfr_sub(ww, wide.hi, wide.lo, MPFR_RNDU);
    mpfr_sub(dw, deep.hi, deep.lo, MPFR_RNDU);
    CHECK(mpfr_cmp(dw, ww) < 0);
    CHECK(mpfr_cmp(deep.lo, wide.hi) <= 0);
    CHECK(mpfr_cmp(wide.lo, deep.hi) <= 0);
    CHECK(mpfr_cmp(deep.lo, up.value) <= 0);
    CHECK(deep.lo.sgn() > 0);
  }
  CHECK_THROWS_AS(S_truncated(mpz_class(3), 50), invalid_input);
}

TEST_CASE("r_l oracle") {
  auto r1 = r_l_oracle(1, 5);
  uint64_t total = 0;
  for (auto& [h, c] : r1) {
    total += c;
    REQUIRE(r1.count(-h) == 1);
    CHECK(r1.at(-h) == c);
  }
  CHECK(total == 4);  // (5-3)^2
  CHECK(r1.at(16) == 1);
  CHECK(r1.at(0) == 2);

  auto r2 = r_l_oracle(2, 12);
  uint64_t total2 = 0;
  for (auto& [h, c] : r2) total2 += c;
  CHECK(total2 == 9 * 9 * 9 * 9);  // (12-3)^(2*2)

  CHECK_THROWS_AS(r_l_oracle(6, 12), budget_exceeded);
  CHECK_THROWS_AS(r_l_oracle(1, 13), budget_exceeded);
}
