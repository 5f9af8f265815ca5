#include "linnik/verify.hpp"

#include <chrono>
#include <cstdlib>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "linnik/beta.hpp"
#include "linnik/common.hpp"
#include "linnik/constants.hpp"
#include "linnik/modmath.hpp"
#include "linnik/pipeline.hpp"
#include "linnik/report.hpp"

namespace linnik::verify {

namespace {

using Clock = std::chrono::steady_clock;

struct Timer {
  Clock::time_point t0 = Clock::now();
  double elapsed() const {
    return std::chrono::duration<double>(Clock::now() - t0).count();
  }
};

CheckResult make(const std::string& name, bool pass, const std::string& detail,
                 double secs) {
  return {name, pass, false, detail, secs};
}

std::vector<uint64_t> odd_squarefree_up_to(uint64_t n) {
  std::vector<uint64_t> out;
  for (uint64_t m = 3; m <= n; m += 2) {
    if (modmath::factorize(m).squarefree()) out.push_back(m);
  }
  return out;
}

// Compares an UpperBound value against a decimal threshold; certified pass
// means value <= threshold.
bool cleared(const UpperBound& ub, const char* threshold) {
  Real t = real_from(std::string(threshold), ub.value.prec(), MPFR_RNDD);
  return mpfr_cmp(ub.value, t) <= 0;
}

}  // namespace

CheckResult criterion1_cross_algorithm(unsigned jobs) {
  Timer timer;
  (void)jobs;
  auto ms = odd_squarefree_up_to(500);
  size_t checked = 0;
  for (uint64_t m : ms) {
    for (unsigned l = 1; l <= 3; l++) {
      mpz_class a = beta::n_l_bruteforce(m, l);
      mpz_class b = beta::n_l_convolution(m, l);
      mpz_class c = beta::n_l_circulant(m, l);
      if (a != b || b != c) {
        std::ostringstream os;
        os << "mismatch at m=" << m << " l=" << l << ": brute=" << a.get_str()
           << " conv=" << b.get_str() << " circ=" << c.get_str();
        return make("criterion 1: cross-algorithm N_l equality", false,
                    os.str(), timer.elapsed());
      }
      checked++;
    }
  }
  std::ostringstream os;
  os << checked << " (m, l) pairs over " << ms.size()
     << " odd square-free moduli <= 500, three algorithms identical";
  return make("criterion 1: cross-algorithm N_l equality", true, os.str(),
              timer.elapsed());
}

CheckResult criterion2_beta1_is_rho() {
  Timer timer;
  std::mt19937_64 rng(0x5eed0001);
  std::uniform_int_distribution<uint64_t> dist(1, 500000);
  for (int i = 0; i < 200; i++) {
    uint64_t m = 2 * dist(rng) + 1;  // odd, 3..10^6+1
    if (m > 1000000) m -= 2;
    if (m < 3) m = 3;
    uint64_t rho = modmath::mult_order2_u64(m);
    mpz_class n1 = beta::n_l(m, 1);
    if (n1 != rho) {
      std::ostringstream os;
      os << "m=" << m << ": N_1=" << n1.get_str() << " but rho=" << rho;
      return make("criterion 2: beta_1(m) = rho(m)", false, os.str(),
                  timer.elapsed());
    }
  }
  return make("criterion 2: beta_1(m) = rho(m)", true,
              "200 random odd m <= 10^6, N_1(m) = rho(m) exactly",
              timer.elapsed());
}

CheckResult criterion3_kappa_identity() {
  Timer timer;
  for (int h = 1; h <= 1000; h++) {
    mpz_class H(h);
    mpq_class lhs = constants::kappa(H);
    mpq_class rhs(constants::local_B(3, H) + 16, 16);
    rhs *= mpq_class(constants::local_B(5, H) + 256, 256);
    rhs.canonicalize();
    if (lhs != rhs) {
      std::ostringstream os;
      os << "kappa identity fails at h=" << h;
      return make("criterion 3: kappa identity + Gauss-sum oracle", false,
                  os.str(), timer.elapsed());
    }
  }
  for (uint64_t p : modmath::primes_up_to(97)) {
    if (p == 2) continue;
    for (int64_t h = -50; h <= 50; h++) {
      auto oracle = constants::local_B_oracle(p, h);
      mpz_class closed = constants::local_B(p, mpz_class(h));
      double diff = std::abs(oracle.real() - closed.get_d());
      if (diff > 1e-6 || std::abs(oracle.imag()) > 1e-6) {
        std::ostringstream os;
        os << "Gauss-sum oracle disagrees at p=" << p << " h=" << h
           << " (diff=" << diff << ")";
        return make("criterion 3: kappa identity + Gauss-sum oracle", false,
                    os.str(), timer.elapsed());
      }
    }
  }
  return make("criterion 3: kappa identity + Gauss-sum oracle", true,
              "kappa piecewise = local product for h <= 1000; closed form "
              "matches complex Gauss sums for p <= 97, |h| <= 50",
              timer.elapsed());
}

CheckResult criterion4_constants() {
  Timer timer;
  const auto& c4 = constants::c4_cached(100000, kDefaultPrec);
  const auto& c3 = constants::c3_cached(1000000, kDefaultPrec);
  UpperBound c3p = constants::c3prime();
  std::ostringstream os;
  bool ok = true;
  auto judge = [&](const char* label, const UpperBound& ub,
                   const char* threshold) {
    bool good = cleared(ub, threshold);
    ok = ok && good;
    os << label << "=" << ub.value.str(8, MPFR_RNDU) << (good ? " <= " : " > ")
       << threshold << "; ";
  };
  judge("c4_partial", c4.partial, "0.97425");
  judge("c4", c4.value, "0.9743");
  judge("c3_partial", c3.partial, "1.390399");
  judge("c3", c3.value, "1.3904");
  bool c3p_ok = cleared(c3p, "0.97336") &&
                constants::c3prime_exact() < mpq_class(97336, 100000) &&
                constants::c3prime_exact() > mpq_class(97, 100);
  ok = ok && c3p_ok;
  os << "c3'=" << c3p.value.str(8, MPFR_RNDU)
     << (c3p_ok ? " < 0.97336" : " NOT < 0.97336");
  return make("criterion 4: constant reproduction (c4, c3, c3')", ok, os.str(),
              timer.elapsed());
}

CheckResult criterion5_inequality_sweeps() {
  Timer timer;
  std::ostringstream os;
  // 1 + 1/c(p) <= 1 + 4.1/p for 5 < p <= 1e5
  for (uint64_t p : modmath::primes_up_to(100000)) {
    if (p <= 5) continue;
    if (constants::c_reciprocal(p) > mpq_class(41, 10 * p)) {
      os << "1/c(p) > 4.1/p at p=" << p;
      return make("criterion 5: inequality sweeps", false, os.str(),
                  timer.elapsed());
    }
    if (p >= 103) {
      // a(p)/(p-1)^4 <= 3.1/p^2  <=>  10 p^2 a(p) <= 31 (p-1)^4
      mpz_class lhs = 10 * mpz_class(p) * p * constants::a_of(p);
      mpz_class q4;
      mpz_ui_pow_ui(q4.get_mpz_t(), p - 1, 4);
      if (lhs > 31 * q4) {
        os << "a-bound fails at p=" << p;
        return make("criterion 5: inequality sweeps", false, os.str(),
                    timer.elapsed());
      }
    }
    if (p >= 742) {
      if (constants::epsilon_of(p) > mpq_class(744, 100) / mpq_class(p * p)) {
        os << "eps(p) > 7.44/p^2 at p=" << p;
        return make("criterion 5: inequality sweeps", false, os.str(),
                    timer.elapsed());
      }
    }
    // c(p) < p - 1  <=>  1/c(p) > 1/(p-1)
    if (constants::c_reciprocal(p) <= mpq_class(1, p - 1)) {
      os << "c(p) >= p-1 at p=" << p;
      return make("criterion 5: inequality sweeps", false, os.str(),
                  timer.elapsed());
    }
  }
  for (unsigned x = 37; x <= 60; x++) {
    if (!constants::m1_ratio_check(x)) {
      os << "m1 ratio inequality fails at x=" << x;
      return make("criterion 5: inequality sweeps", false, os.str(),
                  timer.elapsed());
    }
  }
  return make("criterion 5: inequality sweeps", true,
              "c, a, eps bounds over p <= 1e5 and the m1 totient-ratio "
              "inequality on [37, 60] all hold",
              timer.elapsed());
}

CheckResult criterion6_c0_reproduction(unsigned jobs) {
  Timer timer;
  std::ostringstream os;
  bool ok = true;

  pipeline::C0Options opt;
  opt.jobs = jobs;
  auto r2 = pipeline::c0(2, 37, 39, opt);
  auto r3 = pipeline::c0(3, 37, 39, opt);

  bool b2 = cleared(r2.c0, "0.803");
  bool b3 = cleared(r3.c0, "0.782");
  ok = b2 && b3;
  os << "c0(2,37,39)=" << r2.c0.value.str(8, MPFR_RNDU)
     << (b2 ? " < 0.803" : " NOT < 0.803") << "; c0(3,37,39)="
     << r3.c0.value.str(8, MPFR_RNDU) << (b3 ? " < 0.782" : " NOT < 0.782")
     << "; diagnostics excluding d=1: "
     << r2.c0_excluding_d1.value.str(8, MPFR_RNDU) << ", "
     << r3.c0_excluding_d1.value.str(8, MPFR_RNDU)
     << " (these match the published 0.803 / 0.782 to print precision; the "
        "d=1 terms 1/beta_l(3) and 1/beta_l(15) are part of the defining "
        "sums and push the faithful bound above the published value)";

  // l >= 4 substitute: certified bound weakly decreases as M grows.
  auto r13 = pipeline::c0(4, 13, 13, opt);
  auto r20 = pipeline::c0(4, 20, 20, opt);
  auto r25 = pipeline::c0(4, 25, 25, opt);
  bool mono = mpfr_cmp(r13.c0.value, r20.c0.value) >= 0 &&
              mpfr_cmp(r20.c0.value, r25.c0.value) >= 0;
  os << "; reduced-M monotonicity (l=4, M=13/20/25): "
     << r13.c0.value.str(6, MPFR_RNDU) << " >= "
     << r20.c0.value.str(6, MPFR_RNDU) << " >= "
     << r25.c0.value.str(6, MPFR_RNDU) << (mono ? " holds" : " FAILS");
  ok = ok && mono;

  // c0 weakly decreasing in l on the computed reports.
  bool monol = mpfr_cmp(r2.c0.value, r3.c0.value) >= 0;
  os << "; c0 weakly decreasing in l: " << (monol ? "holds" : "FAILS");
  ok = ok && monol;

  return make("criterion 6: Lemma-3.2-style c0 reproduction", ok, os.str(),
              timer.elapsed());
}

CheckResult criterion7_table2() {
  Timer timer;
  struct Row {
    unsigned l;
    const char* c0;
    unsigned expect;
  };
  const Row rows[] = {{2, "0.803", 26},   {3, "0.782", 27},
                      {4, "0.779", 29},   {5, "0.7773", 31},
                      {6, "0.7772", 33},  {7, "0.77708", 35},
                      {8, "0.77707", 37}};
  std::ostringstream os;
  for (const Row& row : rows) {
    mpq_class c0v = harness::decimal_to_rational(row.c0);
    auto kp = pipeline::min_kprime(row.l, c0v, pipeline::lambda0_default());
    if (kp.kprime != row.expect) {
      os << "l=" << row.l << ": k'=" << kp.kprime << " expected "
         << row.expect;
      return make("criterion 7: minimum k' table and k = 28", false, os.str(),
                  timer.elapsed());
    }
    os << "l=" << row.l << " k'=" << kp.kprime << " ";
  }
  // headline: l = 2 gives k' = 26, k = 26 + 2 = 28
  auto kp2 = pipeline::min_kprime(2, mpq_class(803, 1000),
                                  pipeline::lambda0_default());
  bool head = (kp2.k == 28);
  os << (head ? "; k = 28" : "; headline k != 28");
  return make("criterion 7: minimum k' table and k = 28", head, os.str(),
              timer.elapsed());
}

CheckResult criterion8_table1_spot(unsigned jobs, bool force_long) {
  Timer timer;
  const char* env = std::getenv("LINNIK_LONG");
  if (!force_long && (env == nullptr || std::string(env) != "1")) {
    return {"criterion 8: large-prime beta spot check", true, true,
            "long-run; set LINNIK_LONG=1 to enable", 0.0};
  }
  beta::NlOptions opt;
  opt.algo = beta::Algo::kCirc;
  opt.threads = std::max(1u, jobs);
  auto rec = beta::beta_l(3, 22366891, 7, opt);
  auto dec = harness::decimal_of(rec.beta(), 2);
  bool ok = dec.text == "3089168.27" || dec.text == "3089168.26" ||
            dec.text == "3089168.28";
  std::ostringstream os;
  os << "beta_7(3*22366891) = " << dec.text << " (expected 3089168.27 +-0.01)"
     << ", rho = " << rec.rho;
  return make("criterion 8: large-prime beta spot check", ok, os.str(),
              timer.elapsed());
}

CheckResult criterion9_determinism() {
  Timer timer;
  harness::RunConfig cfg;
  cfg.command = "c0";
  cfg.l = 2;
  cfg.M1 = 13;
  cfg.M2 = 13;
  pipeline::C0Options o1, o8;
  o1.jobs = 1;
  o8.jobs = 8;
  auto r1 = pipeline::c0(2, 13, 13, o1);
  auto r8 = pipeline::c0(2, 13, 13, o8);
  std::string s1 = harness::dump(harness::c0_report_json(r1, cfg));
  std::string s8 = harness::dump(harness::c0_report_json(r8, cfg));
  bool ok = (s1 == s8);
  return make("criterion 9: report determinism across worker counts", ok,
              ok ? "c0 reports byte-identical for jobs=1 and jobs=8"
                 : "reports differ between jobs=1 and jobs=8",
              timer.elapsed());
}

std::vector<CheckResult> module_invariants(unsigned jobs) {
  std::vector<CheckResult> out;
  (void)jobs;

  {  // modmath: order properties over a deterministic sample
    Timer timer;
    bool ok = true;
    std::ostringstream os;
    std::mt19937_64 rng(0x5eed0002);
    std::uniform_int_distribution<uint64_t> dist(1, 500000);
    for (int i = 0; i < 150 && ok; i++) {
      uint64_t m = 2 * dist(rng) + 1;
      uint64_t rho = modmath::mult_order2_u64(m);
      if (modmath::powmod(2, rho, m) != 1) {
        os << "2^rho != 1 at m=" << m;
        ok = false;
        break;
      }
      auto fac = modmath::factorize(rho);
      for (const auto& fe : fac.factors) {
        uint64_t q = mpz_get_ui(fe.prime.get_mpz_t());
        if (modmath::powmod(2, rho / q, m) == 1) {
          os << "order not minimal at m=" << m;
          ok = false;
          break;
        }
      }
      // rho(m) >= log2(m+1): 2^rho >= m+1
      if (rho < 63 && (uint64_t(1) << rho) < m + 1) {
        os << "rho < log2(m+1) at m=" << m;
        ok = false;
      }
      // divisor property on a proper divisor
      auto fm = modmath::factorize(m);
      if (fm.factors.size() > 1) {
        uint64_t d = mpz_get_ui(fm.factors[0].prime.get_mpz_t());
        uint64_t rd = modmath::mult_order2_u64(d);
        if (rho % rd != 0) {
          os << "rho(d) does not divide rho(m) at m=" << m;
          ok = false;
        }
      }
    }
    if (ok) os << "order minimality, log2 bound, divisor property on 150 samples";
    out.push_back(make("modmath: order invariants", ok, os.str(),
                       timer.elapsed()));
  }

  {  // modmath: primes_with_small_order vs direct scan below 10^6
    Timer timer;
    unsigned M = 20;
    auto listed = modmath::primes_with_small_order(M);
    std::map<uint64_t, uint32_t> expect;
    for (uint64_t p : modmath::primes_up_to(1000000)) {
      if (p <= 5) continue;
      uint64_t rho = modmath::mult_order2_u64(p);
      if (rho < M) expect[p] = static_cast<uint32_t>(rho);
    }
    bool ok = true;
    std::ostringstream os;
    for (const auto& sp : listed) {
      if (sp.p < 1000000) {
        auto it = expect.find(sp.p);
        if (it == expect.end() || it->second != sp.order) ok = false;
        else expect.erase(it);
      }
    }
    if (!expect.empty()) {
      ok = false;
      os << expect.size() << " primes missing from the enumeration; ";
    }
    if (ok)
      os << "enumeration for M=20 matches the direct scan of all p < 10^6";
    out.push_back(make("modmath: small-order enumeration completeness", ok,
                       os.str(), timer.elapsed()));
  }

  {  // beta: mass conservation, monotonicity, divisor monotonicity
    Timer timer;
    bool ok = true;
    std::ostringstream os;
    for (uint64_t m : {9ull, 15ull, 21ull, 35ull, 105ull, 231ull, 455ull}) {
      uint64_t rho = modmath::mult_order2_u64(m);
      auto residues = beta::power_residues(m, rho);
      beta::ResidueMultiset ms(m, residues);
      mpz_class mass(rho);
      for (unsigned j = 2; j <= 4; j++) {
        ms.convolve(residues);
        mass *= rho;
        if (ms.mass() != mass) {
          os << "mass conservation fails at m=" << m << " j=" << j;
          ok = false;
          break;
        }
      }
      if (!ok) break;
      // beta monotone in l, bounded by rho * previous
      mpq_class prev;
      for (unsigned l = 1; l <= 4; l++) {
        beta::BetaRecord rec;
        rec.rho = rho;
        rec.l = l;
        rec.n_count = beta::n_l(m, l);
        mpq_class b = rec.beta();
        mpz_class bound;  // N_l <= rho^{2l-1}
        mpz_ui_pow_ui(bound.get_mpz_t(), rho, 2 * l - 1);
        if (rec.n_count > bound) {
          os << "N_l > rho^(2l-1) at m=" << m;
          ok = false;
          break;
        }
        if (b < rho) {
          os << "beta < rho at m=" << m;
          ok = false;
          break;
        }
        if (l > 1 && (b < prev || b > prev * rho)) {
          os << "beta level monotonicity fails at m=" << m << " l=" << l;
          ok = false;
          break;
        }
        prev = b;
      }
      if (!ok) break;
    }
    // divisor monotonicity on computable pairs
    struct Pair {
      uint64_t dsub, d;
    };
    for (const Pair& pr :
         {Pair{3, 21}, Pair{7, 21}, Pair{15, 105}, Pair{21, 105},
          Pair{33, 429}, Pair{5, 35}}) {
      if (!ok) break;
      for (unsigned l = 1; l <= 3; l++) {
        beta::BetaRecord a, b;
        a.rho = modmath::mult_order2_u64(pr.dsub);
        a.l = l;
        a.n_count = beta::n_l(pr.dsub, l);
        b.rho = modmath::mult_order2_u64(pr.d);
        b.l = l;
        b.n_count = beta::n_l(pr.d, l);
        if (a.beta() > b.beta()) {
          os << "divisor monotonicity fails at " << pr.dsub << " | " << pr.d
             << " l=" << l;
          ok = false;
          break;
        }
      }
    }
    if (ok)
      os << "mass = rho^j, beta bounds and level/divisor monotonicity hold";
    out.push_back(make("beta: multiset and monotonicity invariants", ok,
                       os.str(), timer.elapsed()));
  }

  {  // constants: r_l oracle basics and S_truncated vs S_upper spot checks
    Timer timer;
    bool ok = true;
    std::ostringstream os;
    auto r1 = constants::r_l_oracle(1, 5);
    uint64_t total = 0;
    for (auto& [h, c] : r1) {
      total += c;
      if (r1.count(-h) == 0 || r1.at(-h) != c) ok = false;
    }
    if (total != 4 || r1.at(16) != 1) ok = false;
    auto r2 = constants::r_l_oracle(2, 8);
    uint64_t total2 = 0;
    for (auto& [h, c] : r2) total2 += c;
    if (total2 != 625) ok = false;  // (8-3)^4
    // S spot checks
    const auto& c4 = constants::c4_cached(100000, kDefaultPrec);
    for (long hv : {15L, 3L, 21L}) {
      auto up = constants::S_upper(mpz_class(hv), c4.value);
      auto tr = constants::S_truncated(mpz_class(hv), 1000);
      if (mpfr_cmp(tr.lo, up.value) > 0) {
        os << "S_truncated.lo exceeds S_upper at h=" << hv << "; ";
        ok = false;
      }
    }
    auto z = constants::S_truncated(mpz_class(1), 1000);
    if (z.lo.sgn() != 0 || z.hi.sgn() != 0) {
      os << "S_truncated(1) not annihilated by the p=3 factor; ";
      ok = false;
    }
    if (ok) os << "r_l mass/symmetry and S(h) consistency hold";
    out.push_back(
        make("constants: r_l oracle and S(h) spot checks", ok, os.str(),
             timer.elapsed()));
  }

  {  // constants: higher precision never raises a certified bound
    Timer timer;
    auto lo = constants::c4_bound(100000, 192);
    auto hi = constants::c4_bound(100000, 320);
    bool ok = mpfr_cmp(hi.value.value, lo.value.value) <= 0;
    out.push_back(make(
        "constants: precision monotonicity of certified bounds", ok,
        ok ? "c4 at 320 bits <= c4 at 192 bits" : "precision bump raised c4",
        timer.elapsed()));
  }

  {  // pipeline: enumeration completeness against a brute-force scan
    Timer timer;
    bool ok = true;
    std::ostringstream os;
    for (unsigned f : {3u, 15u}) {
      unsigned M = 14;
      auto fast = pipeline::enumerate_admissible(f, M);
      std::set<uint64_t> got;
      for (const auto& am : fast) got.insert(am.d);
      std::set<uint64_t> expect;
      uint64_t dmax = ((uint64_t(1) << M) - 2) / f;
      for (uint64_t d = 1; d <= dmax; d++) {
        auto fac = modmath::factorize(d);
        if (!fac.squarefree()) continue;
        if (d > 1 && fac.factors.front().prime <= 5) continue;
        if (modmath::mult_order2_u64(f * d) < M) expect.insert(d);
      }
      if (got != expect) {
        os << "f=" << f << ": enumeration disagrees with direct scan (got "
           << got.size() << ", expected " << expect.size() << "); ";
        ok = false;
      }
    }
    if (ok) os << "enumerate_admissible matches the direct scan at M=14";
    out.push_back(make("pipeline: admissible enumeration completeness", ok,
                       os.str(), timer.elapsed()));
  }

  return out;
}

std::vector<CheckResult> run_default(unsigned jobs) {
  std::vector<CheckResult> out;
  out.push_back(criterion1_cross_algorithm(jobs));
  out.push_back(criterion2_beta1_is_rho());
  out.push_back(criterion3_kappa_identity());
  out.push_back(criterion4_constants());
  out.push_back(criterion5_inequality_sweeps());
  out.push_back(criterion7_table2());
  out.push_back(criterion9_determinism());
  auto inv = module_invariants(jobs);
  out.insert(out.end(), inv.begin(), inv.end());
  return out;
}

std::vector<CheckResult> run_long(unsigned jobs) {
  auto out = run_default(jobs);
  out.push_back(criterion6_c0_reproduction(jobs));
  out.push_back(criterion8_table1_spot(jobs, false));
  return out;
}

}  // namespace linnik::verify
