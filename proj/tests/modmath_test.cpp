#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "linnik/common.hpp"
#include "linnik/modmath.hpp"

using namespace linnik;
using namespace linnik::modmath;

namespace {

// Trial-division oracle, independent of factorize().
std::vector<std::pair<uint64_t, unsigned>> trial_factor(uint64_t n) {
  std::vector<std::pair<uint64_t, unsigned>> out;
  for (uint64_t p = 2; p * p <= n; p++) {
    unsigned e = 0;
    while (n % p == 0) n /= p, e++;
    if (e) out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

// Direct doubling scan for the order of 2.
uint64_t order_scan(uint64_t m) {
  uint64_t r = 2 % m, t = 1;
  while (r != 1) {
    r = (2 * r) % m;
    t++;
  }
  return t;
}

}  // namespace

TEST_CASE("powmod basics") {
  CHECK(powmod(2, 0, 7) == 1);
  CHECK(powmod(2, 10, 1023) == 1);
  CHECK(powmod(2, 17, 131071) == 1);
  CHECK(powmod(5, 3, 1) == 0);
  CHECK(powmod(mpz_class(2), mpz_class(100),
               mpz_class("1267650600228229401496703205375")) == 1);
  CHECK_THROWS_AS(powmod(2, 3, 0), invalid_input);
}

TEST_CASE("deterministic primality below 2^64") {
  CHECK(is_prime_u64(2));
  CHECK(is_prime_u64(3));
  CHECK_FALSE(is_prime_u64(1));
  CHECK_FALSE(is_prime_u64(561));            // Carmichael
  CHECK_FALSE(is_prime_u64(3215031751ull));  // strong pseudoprime to 2,3,5,7
  CHECK(is_prime_u64(2305843009213693951ull));  // 2^61 - 1
  CHECK(is_prime_u64(131071));
  CHECK_FALSE(is_prime_u64(22366891ull * 3));
  CHECK(is_prime_u64(22366891));
  // agree with a sieve on a small range
  auto ps = primes_up_to(2000);
  size_t idx = 0;
  for (uint64_t n = 2; n <= 2000; n++) {
    bool p = idx < ps.size() && ps[idx] == n;
    if (p) idx++;
    CHECK(is_prime_u64(n) == p);
  }
}

TEST_CASE("factorize matches examples and recomposes") {
  auto f = factorize(uint64_t(1023));
  REQUIRE(f.factors.size() == 3);
  CHECK(f.factors[0].prime == 3);
  CHECK(f.factors[1].prime == 11);
  CHECK(f.factors[2].prime == 31);
  CHECK(f.squarefree());

  auto f15 = factorize(uint64_t(15));
  CHECK(f15.factors.size() == 2);

  // 2^36 - 1 = 3^3 * 5 * 7 * 13 * 19 * 37 * 73 * 109
  auto f36 = factorize((mpz_class(1) << 36) - 1);
  std::vector<std::pair<uint64_t, unsigned>> expect = {
      {3, 3}, {5, 1}, {7, 1}, {13, 1}, {19, 1}, {37, 1}, {73, 1}, {109, 1}};
  REQUIRE(f36.factors.size() == expect.size());
  for (size_t i = 0; i < expect.size(); i++) {
    CHECK(f36.factors[i].prime == expect[i].first);
    CHECK(f36.factors[i].exponent == expect[i].second);
    CHECK(f36.factors[i].proven);
  }
  CHECK(f36.recompose() == f36.value);
  CHECK_FALSE(f36.squarefree());

  CHECK(factorize(uint64_t(1)).factors.empty());
  CHECK_THROWS_AS(factorize(mpz_class(0)), invalid_input);
  CHECK_THROWS_AS(factorize((mpz_class(1) << 129)), budget_exceeded);
}

TEST_CASE("factorize against trial division oracle") {
  std::mt19937_64 rng(12345);
  for (int i = 0; i < 60; i++) {
    uint64_t n = rng() % 5000000 + 2;
    auto f = factorize(n);
    auto oracle = trial_factor(n);
    REQUIRE(f.factors.size() == oracle.size());
    for (size_t j = 0; j < oracle.size(); j++) {
      CHECK(f.factors[j].prime == oracle[j].first);
      CHECK(f.factors[j].exponent == oracle[j].second);
      CHECK(is_prime_u64(oracle[j].first));
    }
    CHECK(f.recompose() == n);
  }
  // a few 64-bit-scale values through the rho path
  for (uint64_t n : {uint64_t(614889782588491410ull),
                     uint64_t(9223372036854775783ull),   // prime near 2^63
                     uint64_t(576460752303423487ull)}) {  // 2^59 - 1
    auto f = factorize(n);
    CHECK(f.recompose() == n);
    for (const auto& fe : f.factors)
      CHECK(classify_prime(fe.prime) == Primality::kPrime);
  }
}

TEST_CASE("mersenne factorizations") {
  auto& m11 = mersenne_factors(11);
  REQUIRE(m11.factors.size() == 2);
  CHECK(m11.factors[0].prime == 23);
  CHECK(m11.factors[1].prime == 89);
  auto& m29 = mersenne_factors(29);
  REQUIRE(m29.factors.size() == 3);
  CHECK(m29.factors[0].prime == 233);
  CHECK(m29.factors[1].prime == 1103);
  CHECK(m29.factors[2].prime == 2089);
  // 2^21 - 1 = 7^2 * 127 * 337
  auto& m21 = mersenne_factors(21);
  REQUIRE(m21.factors.size() == 3);
  CHECK(m21.factors[0].prime == 7);
  CHECK(m21.factors[0].exponent == 2);
  CHECK(m21.recompose() == (mpz_class(1) << 21) - 1);
  CHECK_THROWS_AS(mersenne_factors(65), budget_exceeded);
}

TEST_CASE("mult_order2 examples and oracle scan") {
  CHECK(mult_order2_u64(3) == 2);
  CHECK(mult_order2_u64(15) == 4);
  CHECK(mult_order2_u64(7) == 3);
  CHECK(mult_order2_u64(101) == 100);
  CHECK(mult_order2_u64(107) == 106);
  CHECK(mult_order2_u64(131) == 130);
  CHECK_THROWS_AS(mult_order2(mpz_class(1)), invalid_input);
  CHECK_THROWS_AS(mult_order2(mpz_class(12)), invalid_input);

  for (uint64_t m = 3; m <= 1501; m += 2) {
    uint64_t rho = mult_order2_u64(m);
    CHECK(rho == order_scan(m));
    CHECK(powmod(2, rho, m) == 1);
    // rho >= log2(m + 1), i.e. 2^rho >= m + 1 (trivial once rho >= 64)
    if (rho < 64) {
      unsigned __int128 power = static_cast<unsigned __int128>(1) << rho;
      CHECK(power >= m + 1);
    }
  }
}

TEST_CASE("order divisor property on random pairs") {
  std::mt19937_64 rng(777);
  int tested = 0;
  for (int i = 0; i < 200 && tested < 60; i++) {
    uint64_t a = 2 * (rng() % 2000) + 3;
    uint64_t b = 2 * (rng() % 200) + 3;
    uint64_t q = a * b;
    if (q > (uint64_t(1) << 24)) continue;
    CHECK(mult_order2_u64(q) % mult_order2_u64(a) == 0);
    tested++;
  }
  CHECK(tested > 20);
}

TEST_CASE("jacobi symbol") {
  CHECK(jacobi(1, 5) == 1);
  CHECK(jacobi(3, 5) == -1);
  CHECK(jacobi(15, 5) == 0);
  CHECK_THROWS_AS(jacobi(3, 8), invalid_input);
  // against quadratic-residue enumeration for odd primes up to 50
  for (uint64_t p : primes_up_to(50)) {
    if (p == 2) continue;
    std::set<uint64_t> squares;
    for (uint64_t n = 1; n < p; n++) squares.insert(n * n % p);
    for (uint64_t a = 0; a < p; a++) {
      int expect = a == 0 ? 0 : (squares.count(a) ? 1 : -1);
      CHECK(jacobi(mpz_class(a), mpz_class(p)) == expect);
    }
  }
}

TEST_CASE("primes with small order") {
  auto p4 = primes_with_small_order(4);
  REQUIRE(p4.size() == 1);
  CHECK(p4[0].p == 7);
  CHECK(p4[0].order == 3);

  auto p6 = primes_with_small_order(6);
  REQUIRE(p6.size() == 2);
  CHECK(p6[0].p == 7);
  CHECK(p6[1].p == 31);
  CHECK(p6[1].order == 5);

  auto p13 = primes_with_small_order(13);
  std::map<uint64_t, uint32_t> expect = {{7, 3},   {31, 5},  {127, 7},
                                         {17, 8},  {73, 9},  {11, 10},
                                         {23, 11}, {89, 11}, {13, 12}};
  REQUIRE(p13.size() == expect.size());
  for (const auto& sp : p13) {
    REQUIRE(expect.count(sp.p));
    CHECK(expect[sp.p] == sp.order);
  }

  // completeness against a direct scan (small cap keeps the unit test fast;
  // the full 10^6 scan runs in the verification suite)
  unsigned M = 14;
  std::map<uint64_t, uint32_t> direct;
  for (uint64_t p : primes_up_to(100000)) {
    if (p <= 5) continue;
    uint64_t rho = mult_order2_u64(p);
    if (rho < M) direct[p] = static_cast<uint32_t>(rho);
  }
  auto listed = primes_with_small_order(M);
  for (const auto& sp : listed) {
    if (sp.p < 100000) {
      REQUIRE(direct.count(sp.p));
      CHECK(direct[sp.p] == sp.order);
      direct.erase(sp.p);
    }
  }
  CHECK(direct.empty());
}

TEST_CASE("segmented sieve") {
  auto ps = primes_up_to(100);
  CHECK(ps.size() == 25);
  CHECK(ps.front() == 2);
  CHECK(ps.back() == 97);
  CHECK(nth_prime(1) == 2);
  CHECK(nth_prime(25) == 97);
  CHECK(nth_prime(1000000) == 15485863);
  // segment boundaries: count primes in a window two ways
  size_t count = 0;
  for_primes((1 << 20) - 100, (1 << 20) + 100, [&](uint64_t) { count++; });
  size_t expect = 0;
  for (uint64_t n = (1 << 20) - 100; n <= (1 << 20) + 100; n++)
    if (is_prime_u64(n)) expect++;
  CHECK(count == expect);
}
