#include "linnik/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <thread>

#include "linnik/common.hpp"
#include "linnik/constants.hpp"
#include "linnik/modmath.hpp"
#include "linnik/report.hpp"
#include "linnik/verify.hpp"

namespace linnik::harness {

namespace {

mpz_class parse_mpz(const std::string& s) {
  try {
    return mpz_class(s);
  } catch (const std::invalid_argument&) {
    throw invalid_input("not an integer: " + s);
  }
}

void emit(const ordered_json& j) { std::cout << dump(j); }

std::string env_cache_dir() {
  const char* e = std::getenv("LINNIK_CACHE_DIR");
  return e ? std::string(e) : std::string();
}

struct TimerLog {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  ~TimerLog() {
    double secs = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    std::cerr << "elapsed " << secs << " s\n";
  }
};

int cmd_order(const std::string& arg, RunConfig& cfg) {
  auto rec = modmath::mult_order2(parse_mpz(arg));
  ordered_json j = envelope(cfg);
  j["result"] = {{"modulus", rec.modulus.get_str()},
                 {"order", rec.order.get_str()}};
  // Keep a flat integer field for small moduli so the output is greppable.
  if (rec.order.fits_ulong_p())
    j["result"]["order"] = static_cast<uint64_t>(rec.order.get_ui());
  emit(j);
  return kExitOk;
}

int cmd_factor(const std::string& arg, RunConfig& cfg) {
  auto f = modmath::factorize(parse_mpz(arg));
  ordered_json j = envelope(cfg);
  ordered_json fac = ordered_json::array();
  for (const auto& fe : f.factors) {
    fac.push_back({{"prime", fe.prime.get_str()},
                   {"exponent", fe.exponent},
                   {"proven", fe.proven}});
  }
  j["result"] = {{"value", f.value.get_str()},
                 {"factors", fac},
                 {"squarefree", f.squarefree()},
                 {"fully_proven", f.fully_proven()}};
  emit(j);
  return kExitOk;
}

int cmd_beta(unsigned f, uint64_t d, unsigned l, const std::string& algo,
             RunConfig& cfg) {
  beta::NlOptions opt;
  opt.threads = cfg.jobs;
  if (algo == "auto")
    opt.algo = beta::Algo::kAuto;
  else if (algo == "brute")
    opt.algo = beta::Algo::kBrute;
  else if (algo == "conv")
    opt.algo = beta::Algo::kConv;
  else if (algo == "circ")
    opt.algo = beta::Algo::kCirc;
  else
    throw invalid_input("unknown algorithm: " + algo);
  TimerLog tl;
  auto rec = beta::beta_l(f, d, l, opt);
  ordered_json j = envelope(cfg);
  j["result"] = beta_record_json(rec);
  j["result"]["algorithm"] = algo;
  emit(j);
  return kExitOk;
}

int cmd_kappa(const std::string& arg, RunConfig& cfg) {
  mpq_class k = constants::kappa(parse_mpz(arg));
  ordered_json j = envelope(cfg);
  j["result"] = {{"h", arg},
                 {"kappa_exact", rat_str(k)},
                 {"kappa", decimal_of(k, 6).text}};
  emit(j);
  return kExitOk;
}

int cmd_s_upper(const std::string& arg, RunConfig& cfg) {
  const auto& c4 = constants::c4_cached(cfg.c4_cutoff, cfg.prec());
  auto ub = constants::S_upper(parse_mpz(arg), c4.value, cfg.prec());
  ordered_json j = envelope(cfg);
  j["result"] = {{"h", arg},
                 {"kappa_exact", rat_str(constants::kappa(parse_mpz(arg)))},
                 {"upper_bound", upper_bound_json(ub)}};
  emit(j);
  return kExitOk;
}

int cmd_constants(RunConfig& cfg) {
  TimerLog tl;
  const auto& c4 = constants::c4_cached(cfg.c4_cutoff, cfg.prec());
  const auto& c3 = constants::c3_cached(cfg.c3_primes, cfg.prec());
  auto c3p = constants::c3prime(cfg.prec());
  ordered_json j = envelope(cfg);
  j["result"] = {{"c4", euler_bound_json(c4)},
                 {"c3", euler_bound_json(c3)},
                 {"c3prime",
                  {{"exact", rat_str(constants::c3prime_exact())},
                   {"certified", upper_bound_json(c3p)}}}};
  emit(j);
  return kExitOk;
}

int cmd_enumerate(unsigned f, unsigned M, RunConfig& cfg) {
  auto mods = pipeline::enumerate_admissible(f, M);
  ordered_json j = envelope(cfg);
  ordered_json arr = ordered_json::array();
  for (const auto& am : mods) {
    ordered_json primes = ordered_json::array();
    for (const auto& sp : am.factor_primes)
      primes.push_back({{"p", sp.p}, {"rho", sp.order}});
    arr.push_back({{"d", am.d}, {"rho_fd", am.rho_fd}, {"primes", primes}});
  }
  j["result"] = {{"f", f}, {"M", M}, {"count", mods.size()}, {"moduli", arr}};
  emit(j);
  return kExitOk;
}

int cmd_c0(RunConfig& cfg) {
  TimerLog tl;
  if (cfg.format != "json" && cfg.format != "text")
    throw invalid_input("c0 supports --format json|text");
  pipeline::C0Options opt;
  opt.jobs = cfg.jobs;
  opt.cache_dir = cfg.cache_dir;
  opt.prec = cfg.prec();
  opt.c3_primes = cfg.c3_primes;
  opt.progress = true;
  std::cerr << "c0: l=" << cfg.l << " M1=" << cfg.M1 << " M2=" << cfg.M2
            << " jobs=" << cfg.jobs
            << (cfg.cache_dir.empty() ? "" : " cache=" + cfg.cache_dir)
            << "\n";
  auto rep = pipeline::c0(cfg.l, cfg.M1, cfg.M2, opt);
  if (cfg.format == "text") {
    std::cout << "l=" << rep.l << " M1=" << rep.M1 << " M2=" << rep.M2 << "\n"
              << "c1   <= " << rep.c1.value.str(12, MPFR_RNDU) << "\n"
              << "c2   <= " << rep.c2.value.str(12, MPFR_RNDU) << "\n"
              << "c0   <= " << rep.c0.value.str(12, MPFR_RNDU) << "\n"
              << "c0 excluding d=1 <= "
              << rep.c0_excluding_d1.value.str(12, MPFR_RNDU) << "\n"
              << "min k' = " << rep.kprime.kprime << " (k = " << rep.kprime.k
              << ", margin " << decimal_of(rep.kprime.margin, 9).text << ")\n";
    return kExitOk;
  }
  emit(c0_report_json(rep, cfg));
  return kExitOk;
}

int cmd_table1(RunConfig& cfg, unsigned rows) {
  TimerLog tl;
  struct Row {
    uint64_t p;
    const char* expect;
  };
  const Row all[] = {{22366891, "3089168.27"},
                     {25781083, "15652237.24"},
                     {164511353, "56626483.49"},
                     {616318177, "28269951.69"}};
  rows = std::min<unsigned>(rows, 4);
  std::cout << "p,rho_3p,beta7,expected,seconds\n";
  for (unsigned i = 0; i < rows; i++) {
    auto t0 = std::chrono::steady_clock::now();
    beta::NlOptions opt;
    opt.algo = beta::Algo::kCirc;
    opt.threads = cfg.jobs;
    std::cerr << "table1: computing beta_7(3*" << all[i].p << ")...\n";
    auto rec = beta::beta_l(3, all[i].p, 7, opt);
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    std::cout << all[i].p << ',' << rec.rho << ','
              << decimal_of(rec.beta(), 2).text << ',' << all[i].expect << ','
              << secs << "\n";
  }
  return kExitOk;
}

int cmd_table2(RunConfig& cfg) {
  (void)cfg;
  const std::pair<unsigned, const char*> rows[] = {
      {2, "0.803"},  {3, "0.782"},  {4, "0.779"},   {5, "0.7773"},
      {6, "0.7772"}, {7, "0.77708"}, {8, "0.77707"}};
  std::vector<pipeline::KPrimeResult> out;
  for (auto [l, c0s] : rows) {
    out.push_back(pipeline::min_kprime(l, decimal_to_rational(c0s),
                                       pipeline::lambda0_default()));
  }
  std::cout << table2_csv(out);
  return kExitOk;
}

int cmd_verify(RunConfig& cfg) {
  auto results =
      cfg.long_run ? verify::run_long(cfg.jobs) : verify::run_default(cfg.jobs);
  bool all = true;
  for (const auto& r : results) {
    const char* tag = r.skipped ? "[SKIP]" : (r.pass ? "[PASS]" : "[FAIL]");
    std::cout << tag << " " << r.name << " (" << r.seconds << " s)\n";
    if (!r.detail.empty()) std::cout << "       " << r.detail << "\n";
    all = all && (r.pass || r.skipped);
  }
  std::cout << (all ? "verify: all checks passed\n"
                    : "verify: FAILURES present\n");
  return all ? kExitOk : kExitInternal;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Exact and certified computations for power-of-two counting "
               "constants (multiplicative orders, congruence solution "
               "counts, Euler-product bounds)"};
  app.require_subcommand(1);

  RunConfig cfg;
  cfg.jobs = std::max(1u, std::thread::hardware_concurrency());
  cfg.cache_dir = env_cache_dir();

  std::string arg_n, algo = "auto";
  unsigned f = 3, l = 2, M = 13;
  uint64_t d = 1;
  unsigned rows = 1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--digits", cfg.precision_digits,
                    "working precision in decimal digits (>= 50)")
        ->check(CLI::Range(50u, 10000u));
    sub->add_option("--jobs", cfg.jobs, "worker threads");
  };

  auto* order = app.add_subcommand("order", "multiplicative order of 2 mod m");
  order->add_option("m", arg_n, "odd modulus > 1")->required();

  auto* factor = app.add_subcommand("factor", "factorize a positive integer");
  factor->add_option("n", arg_n, "integer, up to 2^128")->required();

  auto* betac = app.add_subcommand("beta", "beta_l(f*d) record");
  betac->add_option("--f", f, "multiplier, 3 or 15")->required();
  betac->add_option("--d", d, "square-free d with prime factors > 5, or 1")
      ->required();
  betac->add_option("--l", l, "level l >= 1")->required();
  betac->add_option("--algo", algo, "auto|brute|conv|circ");
  add_common(betac);

  auto* kap = app.add_subcommand("kappa", "local factor product at p=3,5");
  kap->add_option("value", arg_n, "nonzero integer h")->required();

  auto* sup = app.add_subcommand("s-upper", "certified upper bound for S(h)");
  sup->add_option("value", arg_n, "nonzero integer h")->required();
  sup->add_option("--c4-cutoff", cfg.c4_cutoff, "prime cutoff for c4");
  add_common(sup);

  auto* cons = app.add_subcommand("constants", "c4, c3, c3' with derivations");
  cons->add_option("--c4-cutoff", cfg.c4_cutoff, "prime cutoff for c4");
  cons->add_option("--c3-primes", cfg.c3_primes, "prime count for c3");
  add_common(cons);

  auto* enu = app.add_subcommand("enumerate", "admissible moduli for (f, M)");
  enu->add_option("--f", f, "multiplier, 3 or 15")->required();
  enu->add_option("--M", M, "cutoff M")->required();

  auto* c0c = app.add_subcommand("c0", "exact/inexact split and c0 bound");
  c0c->add_option("--l", cfg.l, "level l")->required();
  c0c->add_option("--M1", cfg.M1, "cutoff for the f=3 branch");
  c0c->add_option("--M2", cfg.M2, "cutoff for the f=15 branch");
  c0c->add_option("--cache-dir", cfg.cache_dir,
                  "beta record cache directory (env LINNIK_CACHE_DIR)");
  c0c->add_option("--c3-primes", cfg.c3_primes, "prime count for c3");
  c0c->add_option("--format", cfg.format, "json|text");
  add_common(c0c);

  auto* t1 = app.add_subcommand("table1", "large-prime beta_7 rows (long run)");
  t1->add_option("--rows", rows, "number of rows to compute (1..4)");
  add_common(t1);

  app.add_subcommand("table2", "minimum k' per level from the c0 bounds");

  auto* ver = app.add_subcommand("verify", "run the verification suites");
  ver->add_flag("--long", cfg.long_run, "include long-running checks");
  add_common(ver);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalidInput;
  }

  try {
    if (order->parsed()) {
      cfg.command = "order";
      return cmd_order(arg_n, cfg);
    }
    if (factor->parsed()) {
      cfg.command = "factor";
      return cmd_factor(arg_n, cfg);
    }
    if (betac->parsed()) {
      cfg.command = "beta";
      return cmd_beta(f, d, l, algo, cfg);
    }
    if (kap->parsed()) {
      cfg.command = "kappa";
      return cmd_kappa(arg_n, cfg);
    }
    if (sup->parsed()) {
      cfg.command = "s-upper";
      return cmd_s_upper(arg_n, cfg);
    }
    if (cons->parsed()) {
      cfg.command = "constants";
      return cmd_constants(cfg);
    }
    if (enu->parsed()) {
      cfg.command = "enumerate";
      return cmd_enumerate(f, M, cfg);
    }
    if (c0c->parsed()) {
      cfg.command = "c0";
      return cmd_c0(cfg);
    }
    if (t1->parsed()) {
      cfg.command = "table1";
      return cmd_table1(cfg, rows);
    }
    if (app.get_subcommand("table2")->parsed()) {
      cfg.command = "table2";
      return cmd_table2(cfg);
    }
    if (ver->parsed()) {
      cfg.command = "verify";
      return cmd_verify(cfg);
    }
    throw invalid_input("no subcommand");
  } catch (const invalid_input& e) {
    ordered_json err = {{"error", {{"type", "invalid_input"}, {"message", e.what()}}}};
    std::cout << dump(err);
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const budget_exceeded& e) {
    ordered_json err = {{"error", {{"type", "budget_exceeded"}, {"message", e.what()}}}};
    std::cout << dump(err);
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kExitBudget;
  } catch (const cache_corrupt& e) {
    ordered_json err = {{"error", {{"type", "cache_corrupt"}, {"message", e.what()}}}};
    std::cout << dump(err);
    std::cerr << "cache corrupt: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    ordered_json err = {{"error", {{"type", "internal"}, {"message", e.what()}}}};
    std::cout << dump(err);
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace linnik::harness
