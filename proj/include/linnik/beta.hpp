#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <vector>

namespace linnik::beta {

using BigRational = mpq_class;

// 2^1 .. 2^rho mod m; distinct values, the cyclic group generated by 2.
std::vector<uint64_t> power_residues(uint64_t m, uint64_t rho);

// Exact multiset of residue counts mod m; sparse map that switches to a
// dense vector once the live support reaches modulus/4. Counts are
// arbitrary-precision (callers with proven mass bounds use the internal
// u64 engines instead).
class ResidueMultiset {
 public:
  // Unit counts on the given residues.
  ResidueMultiset(uint64_t modulus, const std::vector<uint64_t>& residues);

  // One residue-sum convolution round against a residue list.
  void convolve(const std::vector<uint64_t>& residues);

  mpz_class mass() const;            // sum of all counts
  mpz_class sum_of_squares() const;  // sum of squared counts
  size_t support() const;
  bool dense() const { return dense_; }
  uint64_t modulus() const { return m_; }
  mpz_class count_at(uint64_t residue) const;

 private:
  void densify();
  uint64_t m_;
  bool dense_ = false;
  std::vector<std::pair<uint64_t, mpz_class>> sparse_;  // sorted by residue
  std::vector<mpz_class> vec_;
};

// N_l(m): tuples (u_1..u_l, v_1..v_l) in [1, rho(m)]^{2l} with
// m | sum(2^{u_j} - 2^{v_j}). Three independent algorithms.

// Plain nested-loop enumeration of the u-block and v-block tuples.
mpz_class n_l_bruteforce(uint64_t m, unsigned l);
// Sparse hash-map combination following the binary decomposition of l.
mpz_class n_l_convolution(uint64_t m, unsigned l);
// Dense length-m vector convolved l times with the power-of-two indicator
// (the circulant form of the transition-matrix power).
mpz_class n_l_circulant(uint64_t m, unsigned l, unsigned threads = 1);

enum class Algo { kAuto, kBrute, kConv, kCirc };

struct NlOptions {
  Algo algo = Algo::kAuto;
  unsigned threads = 1;
};

mpz_class n_l(uint64_t m, unsigned l, const NlOptions& opt = {});

struct BetaRecord {
  unsigned f = 3;       // 3 or 15
  uint64_t d = 1;       // square-free, prime factors > 5 (or 1)
  unsigned l = 1;
  uint64_t rho = 0;     // rho(f*d)
  mpz_class n_count;    // N_l(f*d)

  BigRational beta() const;  // rho^{2l} / N_l
};

// Incremental N_l evaluation: one convolution round per advance() with the
// running sum of squares available at every level. Uses u64 counts while the
// total mass provably fits, arbitrary precision otherwise.
class NlEvaluator {
 public:
  NlEvaluator(uint64_t m, uint64_t rho, unsigned max_level);
  void advance();
  unsigned level() const { return level_; }
  mpz_class sum_of_squares() const;  // N at the current level

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
  unsigned level_ = 1;
};

// Validates admissibility of (f, d), computes rho(fd) and N_l(fd).
BetaRecord beta_l(unsigned f, uint64_t d, unsigned l,
                  const NlOptions& opt = {});

}  // namespace linnik::beta
