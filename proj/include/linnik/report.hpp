#pragma once

#include <gmpxx.h>
#include <json.hpp>

#include <string>

#include "linnik/beta.hpp"
#include "linnik/constants.hpp"
#include "linnik/pipeline.hpp"

namespace linnik::harness {

using ordered_json = nlohmann::ordered_json;

// Math-relevant run parameters; serialized into every report. Execution
// scheduling (worker count, cache statistics) deliberately stays out of
// reports and goes to stderr, so runs differing only in --jobs are
// byte-identical.
struct RunConfig {
  std::string command;
  unsigned l = 2;
  unsigned M1 = 37;
  unsigned M2 = 39;
  uint64_t c4_cutoff = 100000;
  uint64_t c3_primes = 1000000;
  unsigned precision_digits = 57;
  bool long_run = false;
  std::string format = "json";  // json | csv | text
  std::string cache_dir;        // not serialized
  unsigned jobs = 1;            // not serialized

  mpfr_prec_t prec() const { return prec_for_digits(precision_digits); }
};

struct DecimalRendering {
  std::string text;
  bool exact = false;  // true when the rendering loses nothing
};

// Fixed-point rendering of an exact rational, round-half-even.
DecimalRendering decimal_of(const mpq_class& q, unsigned places);
std::string rat_str(const mpq_class& q);
// Exact rational value of a decimal literal like "0.803" or "-1.25".
mpq_class decimal_to_rational(const std::string& s);

ordered_json envelope(const RunConfig& cfg);
ordered_json upper_bound_json(const UpperBound& ub, int digits = 50);
ordered_json beta_record_json(const beta::BetaRecord& rec);
ordered_json euler_bound_json(const constants::EulerProductBound& b);
ordered_json kprime_json(const pipeline::KPrimeResult& kp);
ordered_json c0_report_json(const pipeline::C0Report& rep,
                            const RunConfig& cfg);

std::string dump(const ordered_json& j);

// Table shapes (CSV).
std::string table2_csv(const std::vector<pipeline::KPrimeResult>& rows);

}  // namespace linnik::harness
