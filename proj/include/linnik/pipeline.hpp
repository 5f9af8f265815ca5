#pragma once

#include <gmpxx.h>

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "linnik/beta.hpp"
#include "linnik/modmath.hpp"
#include "linnik/real.hpp"

namespace linnik::pipeline {

struct AdmissibleModulus {
  unsigned f = 3;
  uint64_t d = 1;
  uint64_t rho_fd = 0;
  std::vector<modmath::SmallOrderPrime> factor_primes;
};

// Complete list of square-free d (including d = 1) with prime factors > 5,
// d < (2^M - 1)/f and rho(fd) < M, by depth-first products over
// primes_with_small_order(M) with lcm and size pruning. Sorted by
// (number of prime factors, d).
std::vector<AdmissibleModulus> enumerate_admissible(unsigned f, unsigned M);

// Persistent beta records, keyed by (f, d, l). Line-oriented text file with
// a version header and a whole-file checksum; writes are atomic
// (temp + rename). An empty directory path disables persistence.
class BetaCache {
 public:
  explicit BetaCache(std::filesystem::path dir = {});
  std::optional<beta::BetaRecord> get(unsigned f, uint64_t d, unsigned l) const;
  void put(const beta::BetaRecord& rec);
  void flush();
  size_t size() const { return map_.size(); }
  size_t hits() const { return hits_; }
  bool enabled() const { return !dir_.empty(); }
  std::filesystem::path file_path() const;

 private:
  void load();
  std::filesystem::path dir_;
  std::map<std::tuple<unsigned, uint64_t, unsigned>, beta::BetaRecord> map_;
  mutable std::atomic<size_t> hits_ = 0;
  bool dirty_ = false;
};

enum class Fate {
  kIncluded,         // beta_l(fd) < M, contributes to the exact sum
  kExcludedComputed, // beta_j(fd) >= M computed at some level j <= l
  kPrunedByDivisor,  // an admissible divisor d' already has beta_j(fd') >= M
};

struct AuditEntry {
  uint64_t d = 1;
  Fate fate = Fate::kIncluded;
  unsigned level = 0;    // level of the recorded beta (l for included)
  mpq_class beta;        // beta at that level (unset for pruned)
  uint64_t pruned_by = 0;
};

struct ExactPart {
  unsigned f = 3;
  unsigned l = 1;
  unsigned M = 37;
  mpq_class sum;               // includes the d = 1 term
  mpq_class sum_excluding_d1;  // diagnostic partial sum
  std::vector<AuditEntry> audit;
  std::vector<beta::BetaRecord> records;  // included d, level-l records
};

// Sum over admissible d with beta_l(fd) < M of mu^2(d)/c(d) *
// (1/beta_l(fd) - 1/M), exact. Lazy beta evaluation with sound pruning:
// beta_j monotone in j and in divisors; every exclusion carries a proof.
// With progress=true, one line per evaluated d goes to stderr.
ExactPart exact_part(unsigned f, unsigned l, unsigned M, BetaCache* cache,
                     unsigned jobs = 1, bool progress = false);

// Analytic tail of the split at height M:
//  37 <= M <= 99: (8 c3/15) e^gamma [c3'((1+log(M/2))/M - T99) + T99]
//  M > 99:        (8 c3/15) e^gamma (1+log(M/2))/M
//  4 <= M < 37:   flat extension (8 c3 c3'/15) e^gamma log(37/2) (1/M - 1/37)
//                 plus the M = 37 value.
UpperBound inexact_part(unsigned M, const UpperBound& c3,
                        const mpq_class& c3prime,
                        mpfr_prec_t prec = kDefaultPrec);

struct KPrimeResult {
  unsigned l = 2;
  unsigned kprime = 0;
  unsigned k = 0;            // kprime + 2
  mpq_class margin;          // 9/10 - 15 c0 lambda0^(kprime - 2l), exact
  mpq_class lambda0;
};

// Smallest k' >= 2l with 15 c0 lambda0^{k'-2l} < 9/10, decided in exact
// rational arithmetic; also reports the positivity margin.
KPrimeResult min_kprime(unsigned l, const mpq_class& c0_value,
                        const mpq_class& lambda0);

struct C0Options {
  unsigned jobs = 1;
  std::string cache_dir;
  mpfr_prec_t prec = kDefaultPrec;
  uint64_t c3_primes = 1000000;
  bool progress = false;  // per-d lines on stderr
};

struct C0Report {
  unsigned l = 2;
  unsigned M1 = 37;
  unsigned M2 = 39;
  ExactPart exact1;  // f = 3 branch
  ExactPart exact2;  // f = 15 branch
  UpperBound inexact1;
  UpperBound inexact2;
  UpperBound c1;
  UpperBound c2;
  UpperBound c0;     // (75/32) c1 + (105/32) c2
  UpperBound c0_excluding_d1;  // diagnostic: both exact sums without d = 1
  KPrimeResult kprime;               // from the certified c0
  KPrimeResult kprime_excluding_d1;  // from the diagnostic value
  std::string notes;
};

C0Report c0(unsigned l, unsigned M1, unsigned M2, const C0Options& opt = {});

inline mpq_class lambda0_default() { return mpq_class(8844473, 10000000); }

}  // namespace linnik::pipeline
