#include "linnik/constants.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <set>
#include <vector>

#include "linnik/common.hpp"
#include "linnik/modmath.hpp"

namespace linnik::constants {

namespace {

mpz_class pow4(uint64_t base) {
  mpz_class q;
  mpz_ui_pow_ui(q.get_mpz_t(), base, 4);
  return q;
}

// num/den of 1 + 1/c(p) = (q4 + b) / (q4 + a), q4 = (p-1)^4.
void c_ratio_parts(uint64_t p, mpz_class& num, mpz_class& den) {
  mpz_class q4 = pow4(p - 1);
  num = q4 + b_of(p);
  den = q4 + a_of(p);
}

}  // namespace

mpz_class a_of(uint64_t p) {
  mpz_class P(p);
  if (p % 4 == 3) return -(P + 1) * (P + 1);
  return 3 * P * P - 2 * P - 1;
}

mpz_class b_of(uint64_t p) {
  mpz_class P(p);
  if (p % 4 == 3) return (P - 1) * (P + 1) * (P + 1);
  return (P - 1) * (P * P + 6 * P + 1);
}

mpz_class local_B(uint64_t p, const mpz_class& h) {
  if (p < 3 || p % 2 == 0) throw invalid_input("local_B: p must be odd prime");
  bool divides = mpz_divisible_ui_p(h.get_mpz_t(), p);
  if (divides) return b_of(p);
  mpz_class P(p);
  if (p % 4 == 3) return -(P + 1) * (P + 1);
  int chi = modmath::jacobi(h, P);
  return -(P * P + 6 * P + 1) - 4 * P * (P + 1) * chi;
}

std::complex<double> local_B_oracle(uint64_t p, int64_t h) {
  if (p > 200) throw budget_exceeded("local_B_oracle: p capped at 200");
  const double tau = 2.0 * M_PI / static_cast<double>(p);
  std::vector<std::complex<double>> e(p);
  for (uint64_t k = 0; k < p; k++)
    e[k] = {std::cos(tau * k), std::sin(tau * k)};
  // g(a; p) = sum_{n=0}^{p-1} e(a n^2 / p)
  std::vector<std::complex<double>> g(p, 0.0);
  for (uint64_t a = 1; a < p; a++) {
    for (uint64_t n = 0; n < p; n++) g[a] += e[(a * (n * n % p)) % p];
  }
  uint64_t hm = static_cast<uint64_t>(((h % int64_t(p)) + int64_t(p)) % int64_t(p));
  std::complex<double> out = 0.0;
  for (uint64_t a = 1; a < p; a++) {
    std::complex<double> gm1 = g[a] - 1.0;
    double n2 = std::norm(gm1);
    out += n2 * n2 * e[(a * hm) % p];
  }
  return out;
}

LocalFactor local_factor(uint64_t p) {
  return {p, a_of(p), b_of(p), c_reciprocal(p)};
}

mpq_class c_reciprocal(uint64_t p) {
  if (p <= 5) throw invalid_input("c_reciprocal: p must exceed 5");
  mpz_class num, den;
  c_ratio_parts(p, num, den);
  mpq_class r(num - den, den);  // (b - a) / (q4 + a)
  r.canonicalize();
  return r;
}

mpq_class epsilon_of(uint64_t p) {
  if (p <= 5) throw invalid_input("epsilon_of: p must exceed 5");
  mpz_class num, den;
  c_ratio_parts(p, num, den);
  // (num/den) * ((p-1)/p) - 1
  mpq_class r(num * (p - 1) - den * p, den * p);
  r.canonicalize();
  return r;
}

mpq_class kappa(const mpz_class& h) {
  if (h == 0) throw invalid_input("kappa: h must be nonzero");
  if (!mpz_divisible_ui_p(h.get_mpz_t(), 3)) return mpq_class(0);
  if (!mpz_divisible_ui_p(h.get_mpz_t(), 5)) {
    int chi = modmath::jacobi(h, mpz_class(5));
    mpq_class k(15 * (5 - 3 * chi), 32);
    k.canonicalize();
    return k;
  }
  return mpq_class(45, 8);
}

EulerProductBound c4_bound(uint64_t cutoff, mpfr_prec_t prec) {
  if (cutoff < 100000)
    throw invalid_input("c4_bound: cutoff must be >= 100000");
  EulerProductBound out;
  out.cutoff = cutoff;
  out.partial = UpperBound(prec);
  out.value = UpperBound(prec);

  Real acc(prec), t(prec), q(prec);
  mpfr_set_ui(acc, 1, MPFR_RNDU);
  mpz_class a, q4;
  modmath::for_primes(7, cutoff - 1, [&](uint64_t p) {
    a = a_of(p);
    q4 = pow4(p - 1);
    mpfr_set_z(t, a.get_mpz_t(), MPFR_RNDU);
    mpfr_set_z(q, q4.get_mpz_t(), MPFR_RNDD);  // q4 > 0, a/q4 rounded up
    mpfr_div(t, t, q, MPFR_RNDU);
    mpfr_add_ui(t, t, 1, MPFR_RNDU);
    mpfr_mul(acc, acc, t, MPFR_RNDU);
  });
  mpfr_set(out.partial.value, acc.mp(), MPFR_RNDU);
  out.partial.note = "prod_{5<p<cutoff} (1 + a(p)/(p-1)^4), upward-rounded";

  // Tail: (zeta(2) * prod_{p<cutoff} (1 - 1/p^2))^3.1, upward.
  Real tail = zeta2_const(prec, MPFR_RNDU);
  modmath::for_primes(2, cutoff - 1, [&](uint64_t p) {
    mpfr_set_ui(t, 1, MPFR_RNDD);
    mpfr_div_ui(t, t, p, MPFR_RNDD);
    mpfr_div_ui(t, t, p, MPFR_RNDD);
    mpfr_ui_sub(t, 1, t, MPFR_RNDU);
    mpfr_mul(tail, tail, t, MPFR_RNDU);
  });
  Real expo = real_from(std::string("3.1"), prec, MPFR_RNDU);
  mpfr_pow(tail, tail, expo, MPFR_RNDU);
  mpfr_mul(out.value.value, acc, tail, MPFR_RNDU);
  out.value.note =
      "c4: exact prefix over 5<p<cutoff times zeta(2)^3.1 tail "
      "(1+a(p)/(p-1)^4 <= (1-1/p^2)^-3.1 for p >= 103)";
  return out;
}

EulerProductBound c3_bound(uint64_t n_primes, mpfr_prec_t prec) {
  if (n_primes < 1000000)
    throw invalid_input("c3_bound: need at least the first 10^6 primes");
  // Collect the first n_primes primes.
  double nd = static_cast<double>(n_primes);
  uint64_t limit =
      static_cast<uint64_t>(nd * (std::log(nd) + std::log(std::log(nd)))) + 16;
  std::vector<uint64_t> primes;
  primes.reserve(n_primes);
  modmath::for_primes(2, limit, [&](uint64_t p) {
    if (primes.size() < n_primes) primes.push_back(p);
  });
  if (primes.size() < n_primes)
    throw internal_error("c3_bound: prime limit estimate too small");
  primes.resize(n_primes);
  const uint64_t pn = primes.back();

  EulerProductBound out;
  out.cutoff = pn;
  out.partial = UpperBound(prec);
  out.value = UpperBound(prec);

  Real acc(prec), t(prec), q(prec);
  mpfr_set_ui(acc, 1, MPFR_RNDU);
  mpz_class q4, num, den;
  for (uint64_t p : primes) {
    if (p <= 5) continue;
    // 1 + eps(p) = ((q4+b)(p-1)) / ((q4+a) p)
    c_ratio_parts(p, num, den);
    num *= (p - 1);
    den *= p;
    mpfr_set_z(t, num.get_mpz_t(), MPFR_RNDU);
    mpfr_set_z(q, den.get_mpz_t(), MPFR_RNDD);
    mpfr_div(t, t, q, MPFR_RNDU);
    mpfr_mul(acc, acc, t, MPFR_RNDU);
  }
  mpfr_set(out.partial.value, acc.mp(), MPFR_RNDU);
  out.partial.note =
      "prod over first n_primes primes (p > 5) of (1+eps(p)), upward-rounded";

  Real tail = zeta2_const(prec, MPFR_RNDU);
  for (uint64_t p : primes) {
    mpfr_set_ui(t, 1, MPFR_RNDD);
    mpfr_div_ui(t, t, p, MPFR_RNDD);
    mpfr_div_ui(t, t, p, MPFR_RNDD);
    mpfr_ui_sub(t, 1, t, MPFR_RNDU);
    mpfr_mul(tail, tail, t, MPFR_RNDU);
  }
  Real expo = real_from(std::string("7.44"), prec, MPFR_RNDU);
  mpfr_pow(tail, tail, expo, MPFR_RNDU);
  mpfr_mul(out.value.value, acc, tail, MPFR_RNDU);
  out.value.note =
      "c3: exact prefix over first 10^6 primes times zeta(2)^7.44 tail "
      "(1+eps(p) <= (1-1/p^2)^-7.44 for p >= 742)";
  return out;
}

mpq_class c3prime_exact() {
  mpq_class r(100 * 106 * 130, 101 * 107 * 131);
  r.canonicalize();
  return r;
}

UpperBound c3prime(mpfr_prec_t prec) {
  UpperBound ub(prec);
  mpfr_set_q(ub.value, c3prime_exact().get_mpq_t(), MPFR_RNDU);
  ub.note =
      "c3' = (1-1/101)(1-1/107)(1-1/131); rho(101)=100, rho(107)=106, "
      "rho(131)=130 all exceed 99, so none of these primes divides m1(x) "
      "for x <= 99";
  return ub;
}

const EulerProductBound& c3_cached(uint64_t n_primes, mpfr_prec_t prec) {
  static std::map<std::pair<uint64_t, mpfr_prec_t>, EulerProductBound> cache;
  static std::mutex mu;
  std::lock_guard lock(mu);
  auto key = std::make_pair(n_primes, prec);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, c3_bound(n_primes, prec)).first;
  return it->second;
}

const EulerProductBound& c4_cached(uint64_t cutoff, mpfr_prec_t prec) {
  static std::map<std::pair<uint64_t, mpfr_prec_t>, EulerProductBound> cache;
  static std::mutex mu;
  std::lock_guard lock(mu);
  auto key = std::make_pair(cutoff, prec);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, c4_bound(cutoff, prec)).first;
  return it->second;
}

mpq_class m1_totient_ratio(unsigned x) {
  if (x < 4 || x > 60)
    throw budget_exceeded("m1_totient_ratio: x outside [4, 60]");
  std::set<uint64_t> primes;
  for (unsigned e = 1; e <= x / 2; e++) {
    for (const auto& fe : modmath::mersenne_factors(2 * e).factors)
      primes.insert(mpz_get_ui(fe.prime.get_mpz_t()));
  }
  mpq_class r(1);
  for (uint64_t p : primes) r *= mpq_class(p, p - 1);
  r.canonicalize();
  return r;
}

bool m1_ratio_check(unsigned x, mpfr_prec_t prec) {
  mpq_class ratio = m1_totient_ratio(x);
  for (int attempt = 0; attempt < 3; attempt++) {
    mpfr_prec_t pr = prec << attempt;
    // e^gamma * log(x/2), bracketed.
    Real lo(pr), hi(pr), t(pr);
    Real g_lo = gamma_const(pr, MPFR_RNDD);
    Real g_hi = gamma_const(pr, MPFR_RNDU);
    mpfr_exp(lo, g_lo, MPFR_RNDD);
    mpfr_exp(hi, g_hi, MPFR_RNDU);
    mpfr_set_ui(t, x, MPFR_RNDD);
    mpfr_div_ui(t, t, 2, MPFR_RNDD);
    mpfr_log(t, t, MPFR_RNDD);
    mpfr_mul(lo, lo, t, MPFR_RNDD);
    mpfr_set_ui(t, x, MPFR_RNDU);
    mpfr_div_ui(t, t, 2, MPFR_RNDU);
    mpfr_log(t, t, MPFR_RNDU);
    mpfr_mul(hi, hi, t, MPFR_RNDU);
    if (mpfr_cmp_q(lo, ratio.get_mpq_t()) >= 0) return true;
    if (mpfr_cmp_q(hi, ratio.get_mpq_t()) < 0) return false;
  }
  throw internal_error("m1_ratio_check: undecided at maximum precision");
}

Real u_at_pow2(const mpq_class& exponent, mpfr_prec_t prec, mpfr_rnd_t rnd) {
  if (rnd != MPFR_RNDU && rnd != MPFR_RNDD)
    throw invalid_input("u_at_pow2: directed rounding only");
  mpfr_rnd_t opp = (rnd == MPFR_RNDU) ? MPFR_RNDD : MPFR_RNDU;
  // loglog(2^E) = log(E * log 2)
  auto loglog = [&](mpfr_rnd_t r) {
    Real t(prec), l2(prec);
    mpfr_set_q(t, exponent.get_mpq_t(), r);
    mpfr_const_log2(l2, r);
    mpfr_mul(t, t, l2, r);
    mpfr_log(t, t, r);
    return t;
  };
  Real t_same = loglog(rnd);
  Real t_opp = loglog(opp);
  if (t_opp.sgn() <= 0 || t_same.sgn() <= 0)
    throw invalid_input("u_at_pow2: exponent too small, loglog <= 0");
  Real eg(prec), out(prec), second(prec);
  mpfr_exp(eg, gamma_const(prec, rnd), rnd);
  mpfr_mul(out, eg, t_same, rnd);
  Real c = real_from(std::string("2.5064"), prec, rnd);
  mpfr_div(second, c, t_opp, rnd);
  mpfr_add(out, out, second, rnd);
  return out;
}

UpperBound S_upper(const mpz_class& h, const UpperBound& c4,
                   mpfr_prec_t prec) {
  if (h == 0) throw invalid_input("S_upper: h must be nonzero");
  mpq_class k = kappa(h);
  UpperBound out(prec);
  if (k == 0) {
    mpfr_set_zero(out.value, 1);
    out.note = "S(h) vanishes: 3 does not divide h";
    return out;
  }
  mpz_class ha = abs(h);
  auto fac = modmath::factorize(ha);
  mpq_class prod = k;
  for (const auto& fe : fac.factors) {
    if (fe.prime <= 5) continue;
    if (!mpz_fits_ulong_p(fe.prime.get_mpz_t()))
      throw budget_exceeded("S_upper: prime divisor beyond 64 bits");
    prod *= c_reciprocal(mpz_get_ui(fe.prime.get_mpz_t())) + 1;
  }
  prod.canonicalize();
  mpfr_mul_q(out.value, c4.value, prod.get_mpq_t(), MPFR_RNDU);
  out.note = "c4 * kappa(h) * prod_{p>5, p|h} (1 + 1/c(p))";
  return out;
}

Interval S_truncated(const mpz_class& h, uint64_t P0, mpfr_prec_t prec) {
  if (h == 0) throw invalid_input("S_truncated: h must be nonzero");
  if (P0 < 100) throw invalid_input("S_truncated: P0 must be >= 100");
  Interval out(prec);
  mpfr_set_ui(out.lo, 1, MPFR_RNDD);
  mpfr_set_ui(out.hi, 1, MPFR_RNDU);
  Real flo(prec), fhi(prec);

  auto apply = [&](uint64_t p) {
    mpz_class B = local_B(p, h);
    mpz_class q4 = pow4(p - 1);
    mpq_class factor(q4 + B, q4);
    factor.canonicalize();
    mpfr_set_q(flo, factor.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(fhi, factor.get_mpq_t(), MPFR_RNDU);
    mpfr_mul(out.lo, out.lo, flo, MPFR_RNDD);  // factors are >= 0
    mpfr_mul(out.hi, out.hi, fhi, MPFR_RNDU);
  };

  modmath::for_primes(3, P0, apply);
  // Exact factors for the prime divisors of h above the cutoff.
  auto fac = modmath::factorize(abs(h));
  for (const auto& fe : fac.factors) {
    if (!mpz_fits_ulong_p(fe.prime.get_mpz_t()))
      throw budget_exceeded("S_truncated: prime divisor beyond 64 bits");
    uint64_t p = mpz_get_ui(fe.prime.get_mpz_t());
    if (p > P0) apply(p);
  }
  // Tail over p > P0, p not dividing h:
  // |B(p,h)|/(p-1)^4 <= (5p^2+6p+1)/(p-1)^4 <= 6/p^2 for p >= 100, and
  // sum_{p>P0} 1/p^2 < 1/P0, so the multiplier sits in
  // [1 - 6/P0, exp(6/P0)].
  Real t(prec);
  mpfr_set_ui(t, 6, MPFR_RNDU);
  mpfr_div_ui(t, t, P0, MPFR_RNDU);
  mpfr_exp(t, t, MPFR_RNDU);
  mpfr_mul(out.hi, out.hi, t, MPFR_RNDU);
  mpfr_set_ui(t, 6, MPFR_RNDU);
  mpfr_div_ui(t, t, P0, MPFR_RNDU);
  mpfr_ui_sub(t, 1, t, MPFR_RNDD);
  if (out.lo.sgn() > 0) mpfr_mul(out.lo, out.lo, t, MPFR_RNDD);
  return out;
}

std::map<int64_t, uint64_t> r_l_oracle(unsigned l, unsigned L) {
  if (l < 1) throw invalid_input("r_l_oracle: l must be >= 1");
  if (L < 4 || L > 12) throw budget_exceeded("r_l_oracle: L outside [4, 12]");
  double work = std::pow(double(L - 3), 2.0 * l);
  if (work > 1e9) throw budget_exceeded("r_l_oracle: enumeration beyond 1e9");

  // Literal odometer over the u-block exponent tuples.
  std::map<int64_t, uint64_t> sums;
  std::vector<unsigned> expo(l, 4);
  while (true) {
    int64_t s = 0;
    for (unsigned e : expo) s += int64_t(1) << e;
    sums[s]++;
    unsigned lev = l;
    while (lev > 0 && expo[lev - 1] == L) expo[--lev] = 4;
    if (lev == 0) break;
    expo[lev - 1]++;
  }
  std::map<int64_t, uint64_t> out;
  for (const auto& [su, cu] : sums) {
    for (const auto& [sv, cv] : sums) out[su - sv] += cu * cv;
  }
  return out;
}

}  // namespace linnik::constants
