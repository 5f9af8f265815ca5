#include "linnik/modmath.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

#include "linnik/common.hpp"

namespace linnik::modmath {

namespace {

uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m) {
  return static_cast<uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

const mpz_class kFactorLimit = mpz_class(1) << 128;

uint64_t to_u64(const mpz_class& z) { return mpz_get_ui(z.get_mpz_t()); }

bool fits_u64(const mpz_class& z) {
  return z >= 0 && mpz_sizeinbase(z.get_mpz_t(), 2) <= 64;
}

// Pollard-Brent rho on 64-bit words; n odd composite, not a prime power
// guard needed by the caller.
uint64_t brent_rho_u64(uint64_t n, uint64_t seed) {
  if (n % 2 == 0) return 2;
  uint64_t y = seed % n, c = 1 + seed % (n - 1), m = 128;
  uint64_t g = 1, r = 1, q = 1, x = 0, ys = 0;
  while (g == 1) {
    x = y;
    for (uint64_t i = 0; i < r; i++) y = (mulmod(y, y, n) + c) % n;
    for (uint64_t k = 0; k < r && g == 1; k += m) {
      ys = y;
      for (uint64_t i = 0; i < std::min(m, r - k); i++) {
        y = (mulmod(y, y, n) + c) % n;
        q = mulmod(q, x > y ? x - y : y - x, n);
      }
      g = std::gcd(q, n);
    }
    r *= 2;
  }
  if (g == n) {
    do {
      ys = (mulmod(ys, ys, n) + c) % n;
      g = std::gcd(x > ys ? x - ys : ys - x, n);
    } while (g == 1);
  }
  return g;
}

uint64_t find_factor_u64(uint64_t n) {
  for (uint64_t seed = 3;; seed += 2) {
    uint64_t g = brent_rho_u64(n, seed);
    if (g != n) return g;
  }
}

// Brent rho on mpz for cofactors above 2^64.
mpz_class brent_rho_mpz(const mpz_class& n, unsigned long seed) {
  gmp_randclass rng(gmp_randinit_default);
  rng.seed(seed);
  mpz_class y = rng.get_z_range(n - 1) + 1;
  mpz_class c = rng.get_z_range(n - 1) + 1;
  mpz_class x, ys, d, q(1), diff;
  const unsigned long m = 128;
  unsigned long r = 1;
  mpz_class g(1);
  while (g == 1) {
    x = y;
    for (unsigned long i = 0; i < r; i++) y = (y * y + c) % n;
    for (unsigned long k = 0; k < r && g == 1; k += m) {
      ys = y;
      for (unsigned long i = 0; i < std::min(m, r - k); i++) {
        y = (y * y + c) % n;
        diff = x > y ? x - y : y - x;
        q = q * diff % n;
      }
      mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
    }
    r *= 2;
  }
  if (g == n) {
    do {
      ys = (ys * ys + c) % n;
      diff = x > ys ? x - ys : ys - x;
      mpz_gcd(g.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
    } while (g == 1);
  }
  return g;
}

const std::vector<uint64_t>& trial_primes() {
  static const std::vector<uint64_t> ps = primes_up_to(100000);
  return ps;
}

void factor_rec(const mpz_class& n, std::map<mpz_class, unsigned>& acc,
                std::map<mpz_class, bool>& proven) {
  if (n == 1) return;
  Primality pr = classify_prime(n);
  if (pr != Primality::kComposite) {
    acc[n]++;
    proven[n] = (pr == Primality::kPrime);
    return;
  }
  if (mpz_perfect_square_p(n.get_mpz_t())) {
    mpz_class r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    factor_rec(r, acc, proven);
    factor_rec(r, acc, proven);
    return;
  }
  mpz_class g;
  if (fits_u64(n)) {
    g = mpz_class{};
    mpz_set_ui(g.get_mpz_t(), find_factor_u64(to_u64(n)));
  } else {
    unsigned long seed = 0x9e3779b9;
    do {
      g = brent_rho_mpz(n, seed++);
    } while (g == n);
  }
  factor_rec(g, acc, proven);
  factor_rec(n / g, acc, proven);
}

}  // namespace

uint64_t powmod(uint64_t base, uint64_t exponent, uint64_t modulus) {
  if (modulus == 0) throw invalid_input("powmod: modulus must be >= 1");
  if (modulus == 1) return 0;
  uint64_t r = 1;
  base %= modulus;
  while (exponent > 0) {
    if (exponent & 1) r = mulmod(r, base, modulus);
    base = mulmod(base, base, modulus);
    exponent >>= 1;
  }
  return r;
}

mpz_class powmod(const mpz_class& base, const mpz_class& exponent,
                 const mpz_class& modulus) {
  if (modulus < 1) throw invalid_input("powmod: modulus must be >= 1");
  if (exponent < 0) throw invalid_input("powmod: negative exponent");
  mpz_class r;
  mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exponent.get_mpz_t(),
           modulus.get_mpz_t());
  return r;
}

bool is_prime_u64(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull,
                     23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) d >>= 1, s++;
  for (uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull,
                     23ull, 29ull, 31ull, 37ull}) {
    uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; i++) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

Primality classify_prime(const mpz_class& n) {
  if (fits_u64(n))
    return is_prime_u64(to_u64(n)) ? Primality::kPrime : Primality::kComposite;
  int r = mpz_probab_prime_p(n.get_mpz_t(), 64);
  if (r == 0) return Primality::kComposite;
  if (r == 2) return Primality::kPrime;
  return Primality::kProbablePrime;
}

mpz_class Factorization::recompose() const {
  mpz_class r(1);
  for (const auto& fe : factors) {
    for (unsigned i = 0; i < fe.exponent; i++) r *= fe.prime;
  }
  return r;
}

bool Factorization::squarefree() const {
  return std::all_of(factors.begin(), factors.end(),
                     [](const FactorEntry& fe) { return fe.exponent == 1; });
}

bool Factorization::fully_proven() const {
  return std::all_of(factors.begin(), factors.end(),
                     [](const FactorEntry& fe) { return fe.proven; });
}

mpz_class Factorization::radical() const {
  mpz_class r(1);
  for (const auto& fe : factors) r *= fe.prime;
  return r;
}

mpz_class Factorization::totient() const {
  mpz_class r(1);
  for (const auto& fe : factors) {
    r *= fe.prime - 1;
    for (unsigned i = 1; i < fe.exponent; i++) r *= fe.prime;
  }
  return r;
}

Factorization factorize(const mpz_class& n) {
  if (n < 1) throw invalid_input("factorize: n must be positive");
  if (n > kFactorLimit)
    throw budget_exceeded("factorize: n exceeds supported range (2^128)");
  Factorization f;
  f.value = n;
  if (n == 1) return f;

  mpz_class rest = n;
  std::map<mpz_class, unsigned> acc;
  std::map<mpz_class, bool> proven;
  for (uint64_t p : trial_primes()) {
    if (mpz_class(p) * p > rest) break;
    while (mpz_divisible_ui_p(rest.get_mpz_t(), p)) {
      rest /= p;
      acc[mpz_class(p)]++;
      proven[mpz_class(p)] = true;
    }
    if (rest == 1) break;
  }
  if (rest > 1) factor_rec(rest, acc, proven);

  for (const auto& [p, e] : acc)
    f.factors.push_back({p, e, proven.at(p)});
  return f;
}

Factorization factorize(uint64_t n) { return factorize(mpz_class(n)); }

namespace {

const Factorization& mersenne_factors_locked(
    unsigned k, std::map<unsigned, Factorization>& cache) {
  if (auto it = cache.find(k); it != cache.end()) return it->second;

  mpz_class n = (mpz_class(1) << k) - 1;
  Factorization f;
  f.value = n;
  std::map<mpz_class, unsigned> acc;
  mpz_class rest = n;
  // Divide out primes of the algebraic parts 2^d - 1 for d | k, d < k; any
  // prime with rho(p) properly dividing k shows up there. rho only ever sees
  // the primitive cofactor.
  for (unsigned d = 1; d < k; d++) {
    if (k % d != 0) continue;
    const Factorization& sub = mersenne_factors_locked(d, cache);
    for (const auto& fe : sub.factors) {
      while (mpz_divisible_p(rest.get_mpz_t(), fe.prime.get_mpz_t())) {
        rest /= fe.prime;
        acc[fe.prime]++;
      }
    }
  }
  if (rest > 1) {
    Factorization tailf = factorize(rest);
    for (const auto& fe : tailf.factors) acc[fe.prime] += fe.exponent;
  }
  for (const auto& [p, e] : acc) {
    f.factors.push_back({p, e, classify_prime(p) == Primality::kPrime});
  }
  auto [it, ok] = cache.emplace(k, std::move(f));
  (void)ok;
  return it->second;
}

}  // namespace

const Factorization& mersenne_factors(unsigned k) {
  if (k < 1 || k > 64)
    throw budget_exceeded("mersenne_factors: k out of supported range [1,64]");
  static std::map<unsigned, Factorization> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  return mersenne_factors_locked(k, cache);
}

OrderRecord mult_order2(const mpz_class& m) {
  if (m <= 1 || mpz_even_p(m.get_mpz_t()))
    throw invalid_input("mult_order2: modulus must be odd and > 1");
  Factorization fm = factorize(m);
  // Group exponent (Carmichael lambda) of (Z/mZ)*.
  mpz_class lambda(1);
  for (const auto& fe : fm.factors) {
    mpz_class lp = fe.prime - 1;
    for (unsigned i = 1; i < fe.exponent; i++) lp *= fe.prime;
    mpz_lcm(lambda.get_mpz_t(), lambda.get_mpz_t(), lp.get_mpz_t());
  }
  if (powmod(mpz_class(2), lambda, m) != 1)
    throw internal_error("mult_order2: 2^lambda != 1, modulus not coprime to 2?");
  // Descend: strip each prime of lambda while the power stays 1.
  mpz_class t = lambda;
  Factorization fl = factorize(lambda);
  for (const auto& fe : fl.factors) {
    for (unsigned i = 0; i < fe.exponent; i++) {
      mpz_class cand = t / fe.prime;
      if (powmod(mpz_class(2), cand, m) == 1)
        t = cand;
      else
        break;
    }
  }
  return {m, t};
}

uint64_t mult_order2_u64(uint64_t m) {
  OrderRecord r = mult_order2(mpz_class(m));
  return to_u64(r.order);
}

int jacobi(const mpz_class& a, const mpz_class& n) {
  if (n <= 0 || mpz_even_p(n.get_mpz_t()))
    throw invalid_input("jacobi: n must be odd and positive");
  return mpz_jacobi(a.get_mpz_t(), n.get_mpz_t());
}

std::vector<SmallOrderPrime> primes_with_small_order(unsigned M,
                                                     unsigned max_m) {
  if (M < 2) throw invalid_input("primes_with_small_order: M must be >= 2");
  if (M > max_m + 1)
    throw budget_exceeded("primes_with_small_order: M beyond factoring range");
  std::map<uint64_t, uint32_t> found;
  for (unsigned k = 2; k < M; k++) {
    for (const auto& fe : mersenne_factors(k).factors) {
      if (fe.prime <= 5 || !fits_u64(fe.prime)) continue;
      uint64_t p = to_u64(fe.prime);
      if (found.count(p)) continue;
      // p | 2^k - 1, so rho(p) | k; certify rho(p) = k by checking proper
      // divisors directly.
      bool exact = true;
      for (unsigned d = 1; d < k; d++) {
        if (k % d == 0 && powmod(2, d, p) == 1) {
          exact = false;
          break;
        }
      }
      if (!exact)
        throw internal_error("primes_with_small_order: non-primitive prime "
                             "survived algebraic reduction");
      found[p] = k;
    }
  }
  std::vector<SmallOrderPrime> out;
  out.reserve(found.size());
  for (auto [p, o] : found)
    if (o < M) out.push_back({p, o});
  return out;
}

void for_primes(uint64_t lo, uint64_t hi,
                const std::function<void(uint64_t)>& fn) {
  if (hi < 2 || hi < lo) return;
  lo = std::max<uint64_t>(lo, 2);
  const uint64_t root = static_cast<uint64_t>(std::sqrt(double(hi))) + 1;
  std::vector<char> small(root + 1, 1);
  std::vector<uint64_t> base;
  for (uint64_t i = 2; i <= root; i++) {
    if (!small[i]) continue;
    for (uint64_t j = i * i; j <= root; j += i) small[j] = 0;
    base.push_back(i);
  }
  const uint64_t seg = 1 << 20;
  std::vector<char> mark(seg);
  for (uint64_t start = lo; start <= hi; start += seg) {
    uint64_t end = std::min(hi, start + seg - 1);
    std::fill(mark.begin(), mark.begin() + (end - start + 1), 1);
    for (uint64_t p : base) {
      if (p * p > end) break;
      uint64_t first = std::max(p * p, (start + p - 1) / p * p);
      for (uint64_t j = first; j <= end; j += p) mark[j - start] = 0;
    }
    for (uint64_t v = start; v <= end; v++) {
      if (mark[v - start] && v >= 2) fn(v);
    }
  }
}

std::vector<uint64_t> primes_up_to(uint64_t n) {
  std::vector<uint64_t> out;
  for_primes(2, n, [&](uint64_t p) { out.push_back(p); });
  return out;
}

uint64_t nth_prime(uint64_t n) {
  if (n == 0) throw invalid_input("nth_prime: n is 1-based");
  // Rosser-type over-estimate for the search limit.
  double nd = static_cast<double>(std::max<uint64_t>(n, 6));
  uint64_t limit =
      static_cast<uint64_t>(nd * (std::log(nd) + std::log(std::log(nd)))) + 16;
  uint64_t count = 0, result = 0;
  for_primes(2, limit, [&](uint64_t p) {
    if (++count == n) result = p;
  });
  if (result == 0) throw internal_error("nth_prime: limit estimate too small");
  return result;
}

}  // namespace linnik::modmath
