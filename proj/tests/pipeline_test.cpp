#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "linnik/common.hpp"
#include "linnik/constants.hpp"
#include "linnik/modmath.hpp"
#include "linnik/pipeline.hpp"
#include "linnik/report.hpp"

using namespace linnik;
using namespace linnik::pipeline;

TEST_CASE("admissible enumeration examples") {
  auto e13 = enumerate_admissible(3, 13);
  std::set<uint64_t> ds;
  for (const auto& am : e13) ds.insert(am.d);
  CHECK(ds == std::set<uint64_t>{1, 7, 11, 13, 17, 31, 91, 341});
  for (const auto& am : e13) {
    CHECK(am.rho_fd % 2 == 0);  // rho(3) = 2 divides rho(3d)
    CHECK(am.rho_fd == modmath::mult_order2_u64(3 * am.d));
    CHECK(am.rho_fd < 13);
  }

  auto e4 = enumerate_admissible(3, 4);
  REQUIRE(e4.size() == 1);
  CHECK(e4[0].d == 1);

  // even d = 1 drops out once rho(f) reaches the cutoff
  CHECK(enumerate_admissible(3, 2).empty());
  CHECK(enumerate_admissible(15, 4).empty());
  REQUIRE(enumerate_admissible(15, 5).size() == 1);

  for (const auto& am : enumerate_admissible(15, 13)) {
    CHECK(am.rho_fd % 4 == 0);  // rho(15) = 4 divides rho(15d)
    CHECK(am.rho_fd == modmath::mult_order2_u64(15 * am.d));
  }

  CHECK_THROWS_AS(enumerate_admissible(5, 13), invalid_input);
  CHECK_THROWS_AS(enumerate_admissible(3, 70), budget_exceeded);
}

TEST_CASE("admissible enumeration against direct scan") {
  for (unsigned f : {3u, 15u}) {
    unsigned M = 12;
    std::set<uint64_t> got;
    for (const auto& am : enumerate_admissible(f, M)) got.insert(am.d);
    std::set<uint64_t> expect;
    uint64_t dmax = ((uint64_t(1) << M) - 2) / f;
    for (uint64_t d = 1; d <= dmax; d++) {
      auto fac = modmath::factorize(d);
      if (!fac.squarefree()) continue;
      if (d > 1 && fac.factors.front().prime <= 5) continue;
      if (modmath::mult_order2_u64(f * d) < M) expect.insert(d);
    }
    CAPTURE(f);
    CHECK(got == expect);
  }
}

TEST_CASE("exact part hand examples and oracle") {
  auto e1 = exact_part(3, 1, 5, nullptr);
  CHECK(e1.sum == mpq_class(3, 10));
  CHECK(e1.sum_excluding_d1 == 0);

  // larger M only adds nonnegative terms
  auto e1b = exact_part(3, 1, 7, nullptr);
  CHECK(e1b.sum >= e1.sum);

  // independent recomputation over the enumerated d via the brute-force N_l
  auto ep = exact_part(3, 2, 13, nullptr);
  mpq_class direct(0);
  for (const auto& am : enumerate_admissible(3, 13)) {
    uint64_t m = 3 * am.d;
    mpz_class n = beta::n_l_bruteforce(m, 2);
    mpz_class r4;
    mpz_ui_pow_ui(r4.get_mpz_t(), am.rho_fd, 4);
    mpq_class beta(r4, n);
    beta.canonicalize();
    if (beta >= 13) continue;
    mpq_class cr(1);
    for (const auto& sp : am.factor_primes)
      cr *= constants::c_reciprocal(sp.p);
    direct += cr * (1 / beta - mpq_class(1, 13));
  }
  direct.canonicalize();
  CHECK(ep.sum == direct);
  CHECK(ep.sum == mpq_class(31, 104));  // only d = 1 survives beta < 13
}

TEST_CASE("exact part audit trail") {
  auto ep = exact_part(3, 2, 13, nullptr);
  REQUIRE(ep.audit.size() == 8);
  std::map<uint64_t, Fate> fates;
  for (const auto& ae : ep.audit) fates[ae.d] = ae.fate;
  CHECK(fates.at(1) == Fate::kIncluded);
  // d = 7: beta_1(21) = 6 < 13 but beta_2(21) >= 13, so it must appear as
  // computed-and-excluded at level 2, never pruned.
  bool found = false;
  for (const auto& ae : ep.audit) {
    if (ae.d == 7) {
      found = true;
      CHECK(ae.fate == Fate::kExcludedComputed);
      CHECK(ae.level == 2);
      CHECK(ae.beta >= 13);
    }
  }
  CHECK(found);
  // d = 91 = 7 * 13 is killed by its excluded divisor 7
  for (const auto& ae : ep.audit) {
    if (ae.d == 91) {
      CHECK(ae.fate == Fate::kPrunedByDivisor);
      CHECK((ae.pruned_by == 7 || ae.pruned_by == 13));
    }
  }
}

TEST_CASE("inexact part calculus identity by quadrature") {
  // integral_M^inf log(x/2)/x^2 dx = (1 + log(M/2))/M at M = 37, checked
  // by Simpson quadrature after x = e^u.
  const double u0 = std::log(37.0), u1 = 60.0;
  const int n = 1 << 20;
  const double h = (u1 - u0) / n;
  auto f = [](double u) { return (u - std::log(2.0)) * std::exp(-u); };
  double acc = f(u0) + f(u1);
  for (int i = 1; i < n; i++) acc += f(u0 + i * h) * (i % 2 ? 4.0 : 2.0);
  double integral = acc * h / 3.0;
  double closed = (1.0 + std::log(37.0 / 2.0)) / 37.0;
  CHECK(std::abs(integral - closed) < 1e-9);
}

TEST_CASE("inexact part frozen value and shape") {
  // With c3 pinned to exactly 1.3904 and the exact c3', the M = 37 value was
  // fixed by an independent high-precision quadrature oracle:
  const char* frozen = "0.137864840548025769669164102558470322969327984532";
  UpperBound c3(kDefaultPrec);
  mpfr_set_q(c3.value, mpq_class(13904, 10000).get_mpq_t(), MPFR_RNDU);
  auto v = inexact_part(37, c3, constants::c3prime_exact());
  Real lo = real_from(std::string(frozen), kDefaultPrec, MPFR_RNDD);
  Real hi(kDefaultPrec);
  Real eps = real_from(std::string("1e-30"), kDefaultPrec, MPFR_RNDU);
  mpfr_add(hi, lo, eps, MPFR_RNDU);
  CHECK(mpfr_cmp(v.value, lo) >= 0);
  CHECK(mpfr_cmp(v.value, hi) <= 0);

  // strictly decreasing in M on [37, 99]
  auto prev = inexact_part(37, c3, constants::c3prime_exact());
  for (unsigned M : {38u, 50u, 75u, 99u, 150u}) {
    auto cur = inexact_part(M, c3, constants::c3prime_exact());
    CHECK(mpfr_cmp(cur.value, prev.value) < 0);
    prev = cur;
  }
  // flat extension below 37 dominates the M = 37 value
  auto low = inexact_part(13, c3, constants::c3prime_exact());
  CHECK(mpfr_cmp(low.value, v.value) > 0);
  CHECK_THROWS_AS(inexact_part(3, c3, constants::c3prime_exact()),
                  invalid_input);
}

TEST_CASE("min kprime") {
  auto lam = lambda0_default();
  auto k2 = min_kprime(2, mpq_class(803, 1000), lam);
  CHECK(k2.kprime == 26);
  CHECK(k2.k == 28);
  CHECK(k2.margin > 0);
  auto k7 = min_kprime(7, mpq_class(77708, 100000), lam);
  CHECK(k7.kprime == 35);
  // minimality: one step earlier the bound fails
  mpq_class term = 15 * mpq_class(803, 1000);
  for (unsigned j = 0; j + 1 < k2.kprime - 4; j++) term *= lam;
  CHECK(term >= mpq_class(9, 10));
  // tiny c0 needs no powers at all
  auto k0 = min_kprime(3, mpq_class(59, 1000), lam);
  CHECK(k0.kprime == 6);
  CHECK_THROWS_AS(min_kprime(2, mpq_class(803, 1000), mpq_class(3, 2)),
                  invalid_input);
  CHECK_THROWS_AS(min_kprime(2, mpq_class(0), lam), invalid_input);
}

TEST_CASE("beta cache round trip") {
  auto dir = std::filesystem::path("cache_test_tmp");
  std::filesystem::remove_all(dir);

  {
    BetaCache cache(dir);
    CHECK_FALSE(cache.get(3, 7, 2).has_value());  // missing, not an error
    beta::BetaRecord rec;
    rec.f = 3;
    rec.d = 7;
    rec.l = 2;
    rec.rho = 6;
    rec.n_count = 102;
    cache.put(rec);
    cache.put(rec);  // idempotent
    // a 30-digit count survives serialization
    beta::BetaRecord big;
    big.f = 15;
    big.d = 22366891;
    big.l = 7;
    big.rho = 78;
    big.n_count = mpz_class("123456789012345678901234567890");
    cache.put(big);
    cache.flush();
  }
  {
    BetaCache cache(dir);
    auto rec = cache.get(3, 7, 2);
    REQUIRE(rec.has_value());
    CHECK(rec->rho == 6);
    CHECK(rec->n_count == 102);
    auto big = cache.get(15, 22366891, 7);
    REQUIRE(big.has_value());
    CHECK(big->n_count == mpz_class("123456789012345678901234567890"));
    CHECK(cache.hits() == 2);
    // conflicting value for an existing key is an invariant violation
    beta::BetaRecord bad;
    bad.f = 3;
    bad.d = 7;
    bad.l = 2;
    bad.rho = 6;
    bad.n_count = 103;
    CHECK_THROWS_AS(cache.put(bad), internal_error);
  }
  // corruption: flip one digit inside a record line
  {
    auto file = dir / "beta.cache";
    std::ifstream in(file);
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    in.close();
    auto pos = content.find("102");
    REQUIRE(pos != std::string::npos);
    content[pos] = '9';
    std::ofstream out(file, std::ios::trunc);
    out << content;
    out.close();
    CHECK_THROWS_AS(BetaCache{dir}, cache_corrupt);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("c0 pipeline uses and fills the cache") {
  auto dir = std::filesystem::path("cache_test_tmp2");
  std::filesystem::remove_all(dir);
  C0Options opt;
  opt.cache_dir = dir.string();
  auto r1 = c0(2, 13, 13, opt);
  auto r2 = c0(2, 13, 13, opt);  // second run hits the cache throughout
  CHECK(r1.exact1.sum == r2.exact1.sum);
  CHECK(r1.exact2.sum == r2.exact2.sum);
  CHECK(mpfr_cmp(r1.c0.value, r2.c0.value) == 0);
  CHECK(std::filesystem::exists(dir / "beta.cache"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("c0 report structure") {
  C0Options opt;
  auto rep = c0(2, 13, 13, opt);
  // c0 = (75/32) c1 + (105/32) c2 up to directed rounding
  mpq_class combo =
      (75 * rep.c1.value.to_rational() + 105 * rep.c2.value.to_rational()) /
      32;
  mpq_class c0r = rep.c0.value.to_rational();
  CHECK(c0r >= combo);
  CHECK(c0r <= combo * mpq_class(mpz_class(1) << 64, (mpz_class(1) << 64) - 1));
  // exact1 matches the standalone computation
  auto ep = exact_part(3, 2, 13, nullptr);
  CHECK(rep.exact1.sum == ep.sum);
  // the certified bound includes the d = 1 terms
  CHECK(rep.exact1.sum > rep.exact1.sum_excluding_d1);
  CHECK(mpfr_cmp(rep.c0.value, rep.c0_excluding_d1.value) > 0);
}

TEST_CASE("c0 deterministic across worker counts") {
  harness::RunConfig cfg;
  cfg.command = "c0";
  cfg.l = 2;
  cfg.M1 = 13;
  cfg.M2 = 13;
  C0Options a, b;
  a.jobs = 1;
  b.jobs = 3;
  auto ra = c0(2, 13, 13, a);
  auto rb = c0(2, 13, 13, b);
  CHECK(harness::dump(harness::c0_report_json(ra, cfg)) ==
        harness::dump(harness::c0_report_json(rb, cfg)));
}
