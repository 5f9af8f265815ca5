#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "linnik/common.hpp"
#include "linnik/report.hpp"

using namespace linnik;
using namespace linnik::harness;

TEST_CASE("decimal rendering") {
  CHECK(decimal_of(mpq_class(8, 3), 2).text == "2.67");
  CHECK_FALSE(decimal_of(mpq_class(8, 3), 2).exact);
  CHECK(decimal_of(mpq_class(45, 8), 3).text == "5.625");
  CHECK(decimal_of(mpq_class(45, 8), 3).exact);
  // round-half-even on exact midpoints
  CHECK(decimal_of(mpq_class(1, 8), 2).text == "0.12");
  CHECK(decimal_of(mpq_class(3, 8), 2).text == "0.38");
  CHECK(decimal_of(mpq_class(-8, 3), 2).text == "-2.67");
  CHECK(decimal_of(mpq_class(0), 2).text == "0.00");
  CHECK(decimal_of(mpq_class(7), 0).text == "7");
  // the Table-1 presentation shape: large beta to two decimals
  mpq_class q(mpz_class("308916827654321"), mpz_class(100000000));
  CHECK(decimal_of(q, 2).text == "3089168.28");
}

TEST_CASE("decimal literal parsing") {
  CHECK(decimal_to_rational("0.803") == mpq_class(803, 1000));
  CHECK(decimal_to_rational("1.3904") == mpq_class(869, 625));
  CHECK(decimal_to_rational("-1.25") == mpq_class(-5, 4));
  CHECK(decimal_to_rational("12") == 12);
  CHECK_THROWS_AS(decimal_to_rational("abc"), invalid_input);
  CHECK_THROWS_AS(decimal_to_rational(""), invalid_input);
}

TEST_CASE("rational strings") {
  CHECK(rat_str(mpq_class(16, 6)) == "8/3");
  CHECK(rat_str(mpq_class(4)) == "4");
}

TEST_CASE("envelope embeds config and version deterministically") {
  RunConfig cfg;
  cfg.command = "c0";
  cfg.l = 2;
  cfg.M1 = 37;
  cfg.M2 = 39;
  auto j1 = envelope(cfg);
  auto j2 = envelope(cfg);
  CHECK(dump(j1) == dump(j2));
  CHECK(j1["version"] == kVersion);
  CHECK(j1["config"]["M1"] == 37);
  CHECK(j1["config"]["precision_digits"] == 57);
  // scheduling fields stay out of the report
  CHECK(dump(j1).find("jobs") == std::string::npos);
  cfg.jobs = 8;
  CHECK(dump(envelope(cfg)) == dump(j1));
}

TEST_CASE("beta record json") {
  beta::BetaRecord rec;
  rec.f = 3;
  rec.d = 1;
  rec.l = 2;
  rec.rho = 2;
  rec.n_count = 6;
  auto j = beta_record_json(rec);
  CHECK(j["beta_exact"] == "8/3");
  CHECK(j["beta"] == "2.67");
  CHECK(j["n_count"] == "6");
  CHECK(j["beta_is_exact"] == false);
}

TEST_CASE("table2 csv shape") {
  std::vector<pipeline::KPrimeResult> rows;
  rows.push_back(pipeline::min_kprime(2, mpq_class(803, 1000),
                                      pipeline::lambda0_default()));
  auto csv = table2_csv(rows);
  CHECK(csv.find("l,kprime,k,margin\n") == 0);
  CHECK(csv.find("2,26,28,") != std::string::npos);
}

TEST_CASE("upper bound json prints upward-rounded digits") {
  UpperBound ub;
  mpfr_set_q(ub.value, mpq_class(1, 3).get_mpq_t(), MPFR_RNDU);
  ub.note = "test";
  auto j = upper_bound_json(ub, 20);
  std::string s = j["value"];
  CHECK(s.substr(0, 10) == "0.33333333");
  // printed value must not round below the stored bound
  CHECK(s.back() == '4');
}
