#include "linnik/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <iostream>
#include <mutex>
#include <numeric>
#include <thread>

#include "linnik/common.hpp"
#include "linnik/constants.hpp"

namespace linnik::pipeline {

namespace {

mpq_class beta_of(const beta::BetaRecord& rec) { return rec.beta(); }

// 1/c(d) = prod over the prime factors of 1/c(p).
mpq_class c_recip_of(const std::vector<modmath::SmallOrderPrime>& primes) {
  mpq_class r(1);
  for (const auto& sp : primes) r *= constants::c_reciprocal(sp.p);
  r.canonicalize();
  return r;
}

struct DState {
  const AdmissibleModulus* mod = nullptr;
  Fate fate = Fate::kIncluded;
  unsigned level = 0;
  mpq_class beta;
  uint64_t pruned_by = 0;
  std::vector<beta::BetaRecord> computed;  // levels computed this run
  bool done = false;
};

// Evaluate beta levels 1..l for one modulus with early exit at the first
// level whose beta reaches M. Uses cached records when they exist.
void eval_modulus(const AdmissibleModulus& am, unsigned l, unsigned M,
                  const BetaCache* cache, DState& st) {
  uint64_t m = am.f * am.d;
  std::optional<beta::NlEvaluator> eval;

  for (unsigned j = 1; j <= l; j++) {
    beta::BetaRecord rec;
    std::optional<beta::BetaRecord> hit =
        cache ? cache->get(am.f, am.d, j) : std::nullopt;
    if (hit) {
      rec = *hit;
    } else {
      if (!eval) eval.emplace(m, am.rho_fd, l);
      while (eval->level() < j) eval->advance();
      rec.f = am.f;
      rec.d = am.d;
      rec.l = j;
      rec.rho = am.rho_fd;
      rec.n_count = eval->sum_of_squares();
      st.computed.push_back(rec);
    }
    mpq_class b = beta_of(rec);
    if (b >= M) {
      st.fate = Fate::kExcludedComputed;
      st.level = j;
      st.beta = b;
      st.done = true;
      return;
    }
    if (j == l) {
      st.fate = Fate::kIncluded;
      st.level = l;
      st.beta = b;
    }
  }
  st.done = true;
}

}  // namespace

std::vector<AdmissibleModulus> enumerate_admissible(unsigned f, unsigned M) {
  if (f != 3 && f != 15) throw invalid_input("enumerate_admissible: f must be 3 or 15");
  if (M < 2) throw invalid_input("enumerate_admissible: M must be >= 2");
  if (M > 64)
    throw budget_exceeded("enumerate_admissible: M beyond factoring range");
  auto primes = modmath::primes_with_small_order(M);
  const uint64_t rho_f = (f == 3) ? 2 : 4;
  // d < (2^M - 1)/f, i.e. f*d <= 2^M - 2; rho(fd) < M is the binding
  // constraint (it already implies fd <= 2^(M-1) - 1) but the size cut
  // keeps the DFS shallow.
  const unsigned __int128 fd_limit = (((unsigned __int128)1 << M) - 2);

  std::vector<AdmissibleModulus> out;
  std::vector<modmath::SmallOrderPrime> stack;

  auto dfs = [&](auto&& self, size_t start, uint64_t d, uint64_t lcm) -> void {
    if (lcm >= M) return;  // d = 1 itself needs rho(f) < M
    AdmissibleModulus am;
    am.f = f;
    am.d = d;
    am.rho_fd = lcm;
    am.factor_primes = stack;
    out.push_back(std::move(am));
    for (size_t i = start; i < primes.size(); i++) {
      const auto& sp = primes[i];
      uint64_t nl = std::lcm<uint64_t>(lcm, sp.order);
      if (nl >= M) continue;
      unsigned __int128 nd = (unsigned __int128)d * sp.p;
      if (nd * f > fd_limit) continue;
      stack.push_back(sp);
      self(self, i + 1, static_cast<uint64_t>(nd), nl);
      stack.pop_back();
    }
  };
  dfs(dfs, 0, 1, rho_f);

  std::sort(out.begin(), out.end(),
            [](const AdmissibleModulus& a, const AdmissibleModulus& b) {
              if (a.factor_primes.size() != b.factor_primes.size())
                return a.factor_primes.size() < b.factor_primes.size();
              return a.d < b.d;
            });
  return out;
}

ExactPart exact_part(unsigned f, unsigned l, unsigned M, BetaCache* cache,
                     unsigned jobs, bool progress) {
  if (l < 1) throw invalid_input("exact_part: l must be >= 1");
  auto mods = enumerate_admissible(f, M);

  ExactPart out;
  out.f = f;
  out.l = l;
  out.M = M;

  std::vector<DState> states(mods.size());
  for (size_t i = 0; i < mods.size(); i++) states[i].mod = &mods[i];
  std::map<uint64_t, size_t> index_of;
  for (size_t i = 0; i < mods.size(); i++) index_of[mods[i].d] = i;

  // Waves by number of prime factors; divisor-based pruning flows from
  // earlier waves (every divisor of an admissible d is admissible).
  size_t wave_begin = 0;
  while (wave_begin < mods.size()) {
    size_t wave_end = wave_begin;
    size_t nfac = mods[wave_begin].factor_primes.size();
    while (wave_end < mods.size() &&
           mods[wave_end].factor_primes.size() == nfac)
      wave_end++;

    // Mark divisor-pruned states first.
    for (size_t i = wave_begin; i < wave_end; i++) {
      const auto& am = mods[i];
      for (size_t k = 0; k < am.factor_primes.size(); k++) {
        uint64_t dsub = am.d / am.factor_primes[k].p;
        auto it = index_of.find(dsub);
        if (it == index_of.end()) continue;
        const DState& sub = states[it->second];
        if (sub.fate == Fate::kExcludedComputed ||
            sub.fate == Fate::kPrunedByDivisor) {
          states[i].fate = Fate::kPrunedByDivisor;
          states[i].pruned_by =
              sub.fate == Fate::kPrunedByDivisor ? sub.pruned_by : dsub;
          states[i].done = true;
          break;
        }
      }
    }

    // Evaluate the rest of the wave in parallel.
    std::atomic<size_t> next(wave_begin);
    std::mutex log_mu;
    auto worker = [&] {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= wave_end) return;
        if (states[i].done) continue;
        auto t0 = std::chrono::steady_clock::now();
        eval_modulus(mods[i], l, M, cache, states[i]);
        if (progress) {
          double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
          std::lock_guard lock(log_mu);
          std::cerr << "f=" << f << " d=" << mods[i].d
                    << " rho=" << mods[i].rho_fd << " level="
                    << states[i].level << " "
                    << (states[i].fate == Fate::kIncluded ? "included"
                                                          : "excluded")
                    << " " << secs << " s\n";
        }
      }
    };
    unsigned nthreads = std::max(1u, jobs);
    if (nthreads == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (unsigned t = 0; t < nthreads; t++) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
    wave_begin = wave_end;
  }

  // Deterministic fold in canonical order.
  mpq_class inv_M(1, M);
  for (size_t i = 0; i < mods.size(); i++) {
    const auto& am = mods[i];
    DState& st = states[i];
    if (cache) {
      for (const auto& rec : st.computed) cache->put(rec);
    }
    AuditEntry ae;
    ae.d = am.d;
    ae.fate = st.fate;
    ae.level = st.level;
    ae.beta = st.beta;
    ae.pruned_by = st.pruned_by;
    out.audit.push_back(ae);
    if (st.fate != Fate::kIncluded) continue;
    mpq_class term = c_recip_of(am.factor_primes);
    mpq_class inv_beta = 1 / st.beta;
    term *= inv_beta - inv_M;
    term.canonicalize();
    out.sum += term;
    if (am.d > 1) out.sum_excluding_d1 += term;
    // Keep the level-l record for the report.
    beta::BetaRecord rec;
    rec.f = f;
    rec.d = am.d;
    rec.l = l;
    rec.rho = am.rho_fd;
    bool found = false;
    for (const auto& r : st.computed) {
      if (r.l == l) {
        rec = r;
        found = true;
        break;
      }
    }
    if (!found && cache) {
      if (auto hit = cache->get(f, am.d, l)) {
        rec = *hit;
        found = true;
      }
    }
    if (found) out.records.push_back(rec);
  }
  out.sum.canonicalize();
  out.sum_excluding_d1.canonicalize();
  return out;
}

UpperBound inexact_part(unsigned M, const UpperBound& c3,
                        const mpq_class& c3prime, mpfr_prec_t prec) {
  if (M < 4) throw invalid_input("inexact_part: M must be >= 4");

  // (1 + log(x/2))/x, directed.
  auto tail_term = [&](unsigned x, mpfr_rnd_t rnd) {
    Real t(prec);
    mpfr_set_ui(t, x, rnd);
    mpfr_div_ui(t, t, 2, rnd);
    mpfr_log(t, t, rnd);
    mpfr_add_ui(t, t, 1, rnd);
    mpfr_div_ui(t, t, x, rnd);
    return t;
  };

  Real pref(prec);  // (8 c3 / 15) e^gamma, upward
  {
    Real eg(prec);
    mpfr_exp(eg, gamma_const(prec, MPFR_RNDU), MPFR_RNDU);
    mpfr_mul_ui(pref, c3.value, 8, MPFR_RNDU);
    mpfr_div_ui(pref, pref, 15, MPFR_RNDU);
    mpfr_mul(pref, pref, eg, MPFR_RNDU);
  }

  UpperBound out(prec);
  if (M > 99) {
    Real t = tail_term(M, MPFR_RNDU);
    mpfr_mul(out.value, pref, t, MPFR_RNDU);
    out.note = "(8 c3/15) e^gamma (1+log(M/2))/M";
    return out;
  }
  if (M >= 37) {
    Real tM = tail_term(M, MPFR_RNDU);
    Real t99 = tail_term(99, MPFR_RNDD);
    Real diff(prec);
    mpfr_sub(diff, tM, t99, MPFR_RNDU);  // nonnegative for M <= 99
    Real bracket(prec);
    mpfr_mul_q(bracket, diff, c3prime.get_mpq_t(), MPFR_RNDU);
    Real t99u = tail_term(99, MPFR_RNDU);
    mpfr_add(bracket, bracket, t99u, MPFR_RNDU);
    mpfr_mul(out.value, pref, bracket, MPFR_RNDU);
    out.note =
        "(8 c3/15) e^gamma [c3'((1+log(M/2))/M - (1+log(99/2))/99) + "
        "(1+log(99/2))/99]";
    return out;
  }
  // Flat extension below 37: the summatory bound is nondecreasing in x, so
  // its x = 37 value bounds the integrand on [M, 37].
  UpperBound at37 = inexact_part(37, c3, c3prime, prec);
  Real flat(prec), t(prec);
  mpfr_set_ui(t, 37, MPFR_RNDU);
  mpfr_div_ui(t, t, 2, MPFR_RNDU);
  mpfr_log(t, t, MPFR_RNDU);
  mpfr_mul(flat, pref, t, MPFR_RNDU);
  mpfr_mul_q(flat, flat, c3prime.get_mpq_t(), MPFR_RNDU);
  Real width(prec);  // 1/M - 1/37, upward
  {
    Real a(prec), b(prec);
    mpfr_set_ui(a, 1, MPFR_RNDU);
    mpfr_div_ui(a, a, M, MPFR_RNDU);
    mpfr_set_ui(b, 1, MPFR_RNDD);
    mpfr_div_ui(b, b, 37, MPFR_RNDD);
    mpfr_sub(width, a, b, MPFR_RNDU);
  }
  mpfr_mul(flat, flat, width, MPFR_RNDU);
  mpfr_add(out.value, flat, at37.value, MPFR_RNDU);
  out.note =
      "flat extension below 37: (8 c3 c3'/15) e^gamma log(37/2) (1/M - 1/37) "
      "plus the M = 37 tail";
  return out;
}

KPrimeResult min_kprime(unsigned l, const mpq_class& c0_value,
                        const mpq_class& lambda0) {
  if (lambda0 <= 0 || lambda0 >= 1)
    throw invalid_input("min_kprime: lambda0 must lie in (0, 1)");
  if (c0_value <= 0) throw invalid_input("min_kprime: c0 must be positive");
  KPrimeResult out;
  out.l = l;
  out.lambda0 = lambda0;
  const mpq_class nine_tenths(9, 10);
  mpq_class term = 15 * c0_value;
  unsigned j = 0;
  const unsigned kMaxSteps = 100000;
  while (term >= nine_tenths) {
    term *= lambda0;
    if (++j > kMaxSteps)
      throw internal_error("min_kprime: no k' below step cap");
  }
  out.kprime = 2 * l + j;
  out.k = out.kprime + 2;
  out.margin = nine_tenths - term;
  out.margin.canonicalize();
  return out;
}

C0Report c0(unsigned l, unsigned M1, unsigned M2, const C0Options& opt) {
  C0Report rep;
  rep.l = l;
  rep.M1 = M1;
  rep.M2 = M2;

  BetaCache cache(opt.cache_dir.empty() ? std::filesystem::path{}
                                        : std::filesystem::path(opt.cache_dir));
  BetaCache* cp = cache.enabled() ? &cache : nullptr;

  rep.exact1 = exact_part(3, l, M1, cp, opt.jobs, opt.progress);
  rep.exact2 = exact_part(15, l, M2, cp, opt.jobs, opt.progress);
  if (cp) cache.flush();

  const auto& c3 = constants::c3_cached(opt.c3_primes, opt.prec);
  mpq_class c3p = constants::c3prime_exact();
  rep.inexact1 = inexact_part(M1, c3.value, c3p, opt.prec);
  rep.inexact2 = inexact_part(M2, c3.value, c3p, opt.prec);

  auto assemble = [&](const mpq_class& e1, const mpq_class& e2) {
    UpperBound c1(opt.prec), c2(opt.prec), c0v(opt.prec);
    mpfr_set_q(c1.value, e1.get_mpq_t(), MPFR_RNDU);
    mpfr_add(c1.value, c1.value, rep.inexact1.value, MPFR_RNDU);
    mpfr_set_q(c2.value, e2.get_mpq_t(), MPFR_RNDU);
    mpfr_add(c2.value, c2.value, rep.inexact2.value, MPFR_RNDU);
    Real t(opt.prec);
    mpfr_mul_ui(t, c1.value, 75, MPFR_RNDU);
    mpfr_div_ui(t, t, 32, MPFR_RNDU);
    mpfr_mul_ui(c0v.value, c2.value, 105, MPFR_RNDU);
    mpfr_div_ui(c0v.value, c0v.value, 32, MPFR_RNDU);
    mpfr_add(c0v.value, c0v.value, t, MPFR_RNDU);
    return std::tuple(std::move(c1), std::move(c2), std::move(c0v));
  };

  auto [c1, c2, c0v] = assemble(rep.exact1.sum, rep.exact2.sum);
  rep.c1 = std::move(c1);
  rep.c2 = std::move(c2);
  rep.c0 = std::move(c0v);
  rep.c1.note = "exact_part(3, l, M1) + inexact_part(M1)";
  rep.c2.note = "exact_part(15, l, M2) + inexact_part(M2)";
  rep.c0.note = "(75/32) c1 + (105/32) c2";

  auto [c1x, c2x, c0x] = assemble(rep.exact1.sum_excluding_d1,
                                  rep.exact2.sum_excluding_d1);
  rep.c0_excluding_d1 = std::move(c0x);
  rep.c0_excluding_d1.note =
      "diagnostic: same bound with the d = 1 terms omitted from both exact "
      "sums";

  rep.kprime = min_kprime(l, rep.c0.value.to_rational(), lambda0_default());
  rep.kprime_excluding_d1 =
      min_kprime(l, rep.c0_excluding_d1.value.to_rational(), lambda0_default());
  rep.notes =
      "c2 branch reuses the 8/15 tail prefactor of the c1 split unchanged";
  return rep;
}

}  // namespace linnik::pipeline
