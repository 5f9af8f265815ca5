#include "linnik/report.hpp"

#include <sstream>

#include "linnik/common.hpp"

namespace linnik::harness {

DecimalRendering decimal_of(const mpq_class& q, unsigned places) {
  mpz_class num = q.get_num();
  mpz_class den = q.get_den();
  bool neg = num < 0;
  if (neg) num = -num;
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, places);
  mpz_class t = num * scale, quot, rem;
  mpz_fdiv_qr(quot.get_mpz_t(), rem.get_mpz_t(), t.get_mpz_t(),
              den.get_mpz_t());
  bool exact = (rem == 0);
  mpz_class twice = 2 * rem;
  int cmp = ::cmp(twice, den);
  if (cmp > 0 || (cmp == 0 && mpz_odd_p(quot.get_mpz_t()))) quot += 1;

  std::string digits = quot.get_str();
  if (digits.size() <= places)
    digits = std::string(places + 1 - digits.size(), '0') + digits;
  std::string out = digits.substr(0, digits.size() - places);
  if (places > 0) out += "." + digits.substr(digits.size() - places);
  if (neg && quot != 0) out = "-" + out;
  return {out, exact};
}

std::string rat_str(const mpq_class& q) {
  mpq_class c = q;
  c.canonicalize();
  return c.get_str();
}

mpq_class decimal_to_rational(const std::string& s) {
  if (s.empty()) throw invalid_input("empty decimal literal");
  std::string t = s;
  bool neg = false;
  if (t[0] == '+' || t[0] == '-') {
    neg = (t[0] == '-');
    t = t.substr(1);
  }
  size_t dot = t.find('.');
  std::string digits = (dot == std::string::npos)
                           ? t
                           : t.substr(0, dot) + t.substr(dot + 1);
  unsigned places =
      (dot == std::string::npos) ? 0 : static_cast<unsigned>(t.size() - dot - 1);
  if (digits.empty() ||
      digits.find_first_not_of("0123456789") != std::string::npos)
    throw invalid_input("unparseable decimal: " + s);
  mpz_class num;
  if (mpz_set_str(num.get_mpz_t(), digits.c_str(), 10) != 0)
    throw invalid_input("unparseable decimal: " + s);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, places);
  mpq_class q(num, scale);
  q.canonicalize();
  return neg ? mpq_class(-q) : q;
}

ordered_json envelope(const RunConfig& cfg) {
  ordered_json j;
  j["tool"] = "linnik";
  j["version"] = kVersion;
  j["command"] = cfg.command;
  ordered_json c;
  if (cfg.command == "c0" || cfg.command == "verify") {
    c["l"] = cfg.l;
    c["M1"] = cfg.M1;
    c["M2"] = cfg.M2;
  }
  c["c4_cutoff"] = cfg.c4_cutoff;
  c["c3_primes"] = cfg.c3_primes;
  c["precision_digits"] = cfg.precision_digits;
  c["long_run"] = cfg.long_run;
  c["format"] = cfg.format;
  j["config"] = c;
  return j;
}

ordered_json upper_bound_json(const UpperBound& ub, int digits) {
  ordered_json j;
  j["value"] = ub.value.str(digits, MPFR_RNDU);
  j["error_budget"] = ub.error_budget.str(6, MPFR_RNDU);
  j["note"] = ub.note;
  return j;
}

ordered_json beta_record_json(const beta::BetaRecord& rec) {
  ordered_json j;
  j["f"] = rec.f;
  j["d"] = rec.d;
  j["l"] = rec.l;
  j["rho"] = rec.rho;
  j["n_count"] = rec.n_count.get_str();
  mpq_class b = rec.beta();
  j["beta_exact"] = rat_str(b);
  auto dec = decimal_of(b, 2);
  j["beta"] = dec.text;
  j["beta_is_exact"] = dec.exact;
  return j;
}

ordered_json euler_bound_json(const constants::EulerProductBound& b) {
  ordered_json j;
  j["cutoff"] = b.cutoff;
  j["partial"] = upper_bound_json(b.partial);
  j["certified"] = upper_bound_json(b.value);
  return j;
}

ordered_json kprime_json(const pipeline::KPrimeResult& kp) {
  ordered_json j;
  j["l"] = kp.l;
  j["kprime"] = kp.kprime;
  j["k"] = kp.k;
  j["lambda0"] = rat_str(kp.lambda0);
  j["margin"] = decimal_of(kp.margin, 9).text;
  return j;
}

namespace {

const char* fate_str(pipeline::Fate f) {
  switch (f) {
    case pipeline::Fate::kIncluded:
      return "included";
    case pipeline::Fate::kExcludedComputed:
      return "excluded_computed";
    case pipeline::Fate::kPrunedByDivisor:
      return "pruned_by_divisor";
  }
  return "?";
}

ordered_json exact_part_json(const pipeline::ExactPart& ep) {
  ordered_json j;
  j["f"] = ep.f;
  j["l"] = ep.l;
  j["M"] = ep.M;
  j["sum_exact"] = rat_str(ep.sum);
  j["sum"] = decimal_of(ep.sum, 12).text;
  j["sum_excluding_d1_exact"] = rat_str(ep.sum_excluding_d1);
  j["sum_excluding_d1"] = decimal_of(ep.sum_excluding_d1, 12).text;
  size_t inc = 0, exc = 0, pru = 0;
  ordered_json audit = ordered_json::array();
  for (const auto& ae : ep.audit) {
    ordered_json a;
    a["d"] = ae.d;
    a["fate"] = fate_str(ae.fate);
    if (ae.fate == pipeline::Fate::kPrunedByDivisor) {
      a["pruned_by"] = ae.pruned_by;
      pru++;
    } else {
      a["level"] = ae.level;
      a["beta"] = decimal_of(ae.beta, 4).text;
      (ae.fate == pipeline::Fate::kIncluded ? inc : exc)++;
    }
    audit.push_back(a);
  }
  j["included"] = inc;
  j["excluded_computed"] = exc;
  j["pruned_by_divisor"] = pru;
  j["audit"] = audit;
  return j;
}

}  // namespace

ordered_json c0_report_json(const pipeline::C0Report& rep,
                            const RunConfig& cfg) {
  ordered_json j = envelope(cfg);
  ordered_json r;
  r["l"] = rep.l;
  r["M1"] = rep.M1;
  r["M2"] = rep.M2;
  r["c1"] = upper_bound_json(rep.c1);
  r["c2"] = upper_bound_json(rep.c2);
  r["c0"] = upper_bound_json(rep.c0);
  r["c0_excluding_d1"] = upper_bound_json(rep.c0_excluding_d1);
  r["inexact1"] = upper_bound_json(rep.inexact1);
  r["inexact2"] = upper_bound_json(rep.inexact2);
  r["min_kprime"] = kprime_json(rep.kprime);
  r["min_kprime_excluding_d1"] = kprime_json(rep.kprime_excluding_d1);
  r["exact1"] = exact_part_json(rep.exact1);
  r["exact2"] = exact_part_json(rep.exact2);
  ordered_json recs = ordered_json::array();
  for (const auto& rec : rep.exact1.records) recs.push_back(beta_record_json(rec));
  for (const auto& rec : rep.exact2.records) recs.push_back(beta_record_json(rec));
  r["records"] = recs;
  r["notes"] = rep.notes;
  j["result"] = r;
  return j;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

std::string table2_csv(const std::vector<pipeline::KPrimeResult>& rows) {
  std::ostringstream os;
  os << "l,kprime,k,margin\n";
  for (const auto& kp : rows) {
    os << kp.l << ',' << kp.kprime << ',' << kp.k << ','
       << decimal_of(kp.margin, 9).text << "\n";
  }
  return os.str();
}

}  // namespace linnik::harness
