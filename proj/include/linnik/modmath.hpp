#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <vector>

namespace linnik::modmath {

// base^exponent mod modulus by binary exponentiation; total for modulus >= 1.
uint64_t powmod(uint64_t base, uint64_t exponent, uint64_t modulus);
mpz_class powmod(const mpz_class& base, const mpz_class& exponent,
                 const mpz_class& modulus);

// Deterministic Miller-Rabin, 12-prime witness set (valid far beyond 2^64).
bool is_prime_u64(uint64_t n);

enum class Primality { kComposite, kPrime, kProbablePrime };
Primality classify_prime(const mpz_class& n);

struct FactorEntry {
  mpz_class prime;
  unsigned exponent = 1;
  bool proven = true;  // false for probable primes above the 2^64 gate
};

struct Factorization {
  mpz_class value;
  std::vector<FactorEntry> factors;  // primes strictly increasing

  mpz_class recompose() const;
  bool squarefree() const;
  bool fully_proven() const;
  mpz_class radical() const;
  mpz_class totient() const;
};

// Complete factorization; trial division then Pollard-Brent rho with
// primality certification per cofactor. Supported range: n <= 2^128.
Factorization factorize(const mpz_class& n);
Factorization factorize(uint64_t n);

// Memoized factorization of 2^k - 1 (k <= 64): algebraic parts 2^d - 1 for
// d | k are divided out first, rho only sees primitive cofactors.
const Factorization& mersenne_factors(unsigned k);

struct OrderRecord {
  mpz_class modulus;
  mpz_class order;  // rho(modulus)
};

// Multiplicative order of 2 mod m (m odd, m > 1), by factoring the group
// exponent of (Z/mZ)* and descending through its prime divisors.
OrderRecord mult_order2(const mpz_class& m);
uint64_t mult_order2_u64(uint64_t m);

// Jacobi symbol (a/n); n odd positive.
int jacobi(const mpz_class& a, const mpz_class& n);

struct SmallOrderPrime {
  uint64_t p;
  uint32_t order;  // rho(p)
};

// The complete set of primes p > 5 with rho(p) < M, read off the
// factorizations of 2^k - 1 for k < M. Completeness: rho(p) = k forces
// p | 2^k - 1. Sorted by p. M is capped at max_m (factoring range gate).
std::vector<SmallOrderPrime> primes_with_small_order(unsigned M,
                                                     unsigned max_m = 64);

// Segmented sieve of Eratosthenes over [lo, hi].
void for_primes(uint64_t lo, uint64_t hi,
                const std::function<void(uint64_t)>& fn);
std::vector<uint64_t> primes_up_to(uint64_t n);
uint64_t nth_prime(uint64_t n);  // 1-based: nth_prime(1) = 2

}  // namespace linnik::modmath
