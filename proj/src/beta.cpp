#include "linnik/beta.hpp"

#include <algorithm>
#include <thread>
#include <unordered_map>

#include "linnik/common.hpp"
#include "linnik/modmath.hpp"

namespace linnik::beta {

namespace {

constexpr uint64_t kBruteWorkLimit = 2'000'000'000;   // tuples per block
constexpr uint64_t kSparseSupportLimit = 100'000'000; // map entries
// Two u64 buffers at this size peak near 8.5 GB.
constexpr uint64_t kDenseU64Limit = 530'000'000;
constexpr uint64_t kDenseMpzLimit = 20'000'000;
constexpr uint64_t kU64SafeMass = uint64_t(1) << 62;  // counts stay below this

// rho^l saturated at `cap`.
uint64_t pow_sat(uint64_t rho, unsigned l, uint64_t cap) {
  unsigned __int128 acc = 1;
  for (unsigned i = 0; i < l; i++) {
    acc *= rho;
    if (acc >= cap) return cap;
  }
  return static_cast<uint64_t>(acc);
}

mpz_class mpz_from_u128(unsigned __int128 x) {
  mpz_class hi(static_cast<uint64_t>(x >> 64));
  hi <<= 64;
  hi += static_cast<uint64_t>(x);
  return hi;
}

uint64_t order_of(uint64_t m) {
  if (m < 3 || m % 2 == 0)
    throw invalid_input("N_l: modulus must be odd and >= 3");
  if (m >= (uint64_t(1) << 62))
    throw budget_exceeded("N_l: modulus beyond 2^62");
  return modmath::mult_order2_u64(m);
}

using SparseU64 = std::unordered_map<uint64_t, uint64_t>;

SparseU64 combine(const SparseU64& a, const SparseU64& b, uint64_t m) {
  unsigned __int128 work =
      static_cast<unsigned __int128>(a.size()) * b.size();
  if (work > 8'000'000'000ull)
    throw budget_exceeded("N_l convolution: combine work beyond budget");
  SparseU64 out;
  out.reserve(std::min<uint64_t>(static_cast<uint64_t>(work), m));
  for (const auto& [k1, v1] : a) {
    for (const auto& [k2, v2] : b) {
      uint64_t k = k1 + k2;
      if (k >= m) k -= m;
      out[k] += v1 * v2;
    }
  }
  if (out.size() > kSparseSupportLimit)
    throw budget_exceeded("N_l convolution: support beyond memory budget");
  return out;
}

using SparseMpz = std::unordered_map<uint64_t, mpz_class>;

SparseMpz combine(const SparseMpz& a, const SparseMpz& b, uint64_t m) {
  unsigned __int128 work =
      static_cast<unsigned __int128>(a.size()) * b.size();
  if (work > 1'000'000'000ull)
    throw budget_exceeded("N_l convolution: combine work beyond budget");
  SparseMpz out;
  for (const auto& [k1, v1] : a) {
    for (const auto& [k2, v2] : b) {
      uint64_t k = k1 + k2;
      if (k >= m) k -= m;
      out[k] += v1 * v2;
    }
  }
  if (out.size() > kSparseSupportLimit)
    throw budget_exceeded("N_l convolution: support beyond memory budget");
  return out;
}

template <class Sparse>
mpz_class sum_squares_sparse(const Sparse& s) {
  if constexpr (std::is_same_v<Sparse, SparseU64>) {
    unsigned __int128 acc = 0;
    for (const auto& [r, v] : s)
      acc += static_cast<unsigned __int128>(v) * v;
    return mpz_from_u128(acc);
  } else {
    mpz_class acc(0);
    for (const auto& [r, v] : s) acc += v * v;
    return acc;
  }
}

// One cyclic-convolution round with the residue indicator, dense u64,
// output rows [a, b) only. Split at the wrap point so both source ranges
// are contiguous.
void circulant_round_range(const std::vector<uint64_t>& in,
                           std::vector<uint64_t>& out,
                           const std::vector<uint64_t>& residues, uint64_t m,
                           uint64_t a, uint64_t b) {
  std::fill(out.begin() + a, out.begin() + b, 0);
  for (uint64_t s : residues) {
    uint64_t split = std::clamp<uint64_t>(s, a, b);
    for (uint64_t j = a; j < split; j++) out[j] += in[j + m - s];
    for (uint64_t j = split; j < b; j++) out[j] += in[j - s];
  }
}

mpz_class n_l_circulant_u64(uint64_t m, unsigned l,
                            const std::vector<uint64_t>& residues,
                            unsigned threads) {
  std::vector<uint64_t> cur(m, 0), next(m);
  for (uint64_t r : residues) cur[r] += 1;
  threads = std::max(1u, threads);
  for (unsigned round = 2; round <= l; round++) {
    if (threads == 1 || m < 1u << 16) {
      circulant_round_range(cur, next, residues, m, 0, m);
    } else {
      std::vector<std::thread> pool;
      uint64_t chunk = (m + threads - 1) / threads;
      for (unsigned t = 0; t < threads; t++) {
        uint64_t a = t * chunk, b = std::min<uint64_t>(m, a + chunk);
        if (a >= b) break;
        pool.emplace_back([&, a, b] {
          circulant_round_range(cur, next, residues, m, a, b);
        });
      }
      for (auto& th : pool) th.join();
    }
    cur.swap(next);
  }
  unsigned __int128 acc = 0;
  for (uint64_t v : cur) acc += static_cast<unsigned __int128>(v) * v;
  return mpz_from_u128(acc);
}

mpz_class n_l_circulant_mpz(uint64_t m, unsigned l,
                            const std::vector<uint64_t>& residues) {
  if (m > kDenseMpzLimit)
    throw budget_exceeded("N_l circulant: modulus beyond mpz dense budget");
  std::vector<mpz_class> cur(m), next(m);
  for (uint64_t r : residues) cur[r] += 1;
  for (unsigned round = 2; round <= l; round++) {
    for (uint64_t j = 0; j < m; j++) next[j] = 0;
    for (uint64_t s : residues) {
      for (uint64_t j = s; j < m; j++) next[j] += cur[j - s];
      for (uint64_t j = 0; j < s; j++) next[j] += cur[j + m - s];
    }
    cur.swap(next);
  }
  mpz_class acc(0);
  for (const auto& v : cur) acc += v * v;
  return acc;
}

// Counts l-fold sums of the residue list by plain nested enumeration.
// Dense array for small moduli, hash map otherwise.
struct BruteCounts {
  std::vector<uint64_t> dense;
  SparseU64 sparse;
  bool use_dense;
};

BruteCounts brute_block(uint64_t m, unsigned l,
                        const std::vector<uint64_t>& residues) {
  BruteCounts c;
  c.use_dense = m <= 100'000'000;
  if (c.use_dense) c.dense.assign(m, 0);
  // Iterative odometer over l digits, keeping partial sums per level.
  std::vector<unsigned> idx(l, 0);
  std::vector<uint64_t> partial(l + 1, 0);
  const uint64_t rho = residues.size();
  for (unsigned lev = 0; lev < l; lev++) {
    uint64_t s = partial[lev] + residues[0];
    if (s >= m) s -= m;
    partial[lev + 1] = s;
  }
  while (true) {
    uint64_t r = partial[l];
    if (c.use_dense)
      c.dense[r]++;
    else
      c.sparse[r]++;
    // advance odometer
    unsigned lev = l;
    while (lev > 0 && idx[lev - 1] + 1 == rho) {
      idx[lev - 1] = 0;
      lev--;
    }
    if (lev == 0) break;
    idx[lev - 1]++;
    for (unsigned j = lev - 1; j < l; j++) {
      uint64_t s = partial[j] + residues[idx[j]];
      if (s >= m) s -= m;
      partial[j + 1] = s;
    }
  }
  return c;
}

// Successive convolution rounds: sparse map while the live support stays
// below m/4, dense vector once it saturates.
mpz_class n_l_auto(uint64_t m, unsigned l, uint64_t rho,
                   const std::vector<uint64_t>& residues, unsigned threads) {
  uint64_t mass = pow_sat(rho, l, kU64SafeMass);
  if (mass >= kU64SafeMass) {
    // Counts may overflow u64; use the arbitrary-precision multiset
    // (same switching rule).
    ResidueMultiset ms(m, residues);
    for (unsigned round = 2; round <= l; round++) ms.convolve(residues);
    return ms.sum_of_squares();
  }
  SparseU64 base;
  base.reserve(rho);
  for (uint64_t r : residues) base[r]++;
  SparseU64 scur = base;
  unsigned round = 2;
  for (; round <= l && scur.size() < m / 4; round++)
    scur = combine(scur, base, m);
  if (round > l) return sum_squares_sparse(scur);
  if (m > kDenseU64Limit)
    throw budget_exceeded("N_l: saturated support beyond dense memory budget");
  std::vector<uint64_t> cur(m, 0), next(m);
  for (const auto& [r, v] : scur) cur[r] = v;
  for (; round <= l; round++) {
    if (threads <= 1 || m < 1u << 16) {
      circulant_round_range(cur, next, residues, m, 0, m);
    } else {
      std::vector<std::thread> pool;
      uint64_t chunk = (m + threads - 1) / threads;
      for (unsigned t = 0; t < threads; t++) {
        uint64_t a = t * chunk, b = std::min<uint64_t>(m, a + chunk);
        if (a >= b) break;
        pool.emplace_back([&, a, b] {
          circulant_round_range(cur, next, residues, m, a, b);
        });
      }
      for (auto& th : pool) th.join();
    }
    cur.swap(next);
  }
  unsigned __int128 acc = 0;
  for (uint64_t v : cur) acc += static_cast<unsigned __int128>(v) * v;
  return mpz_from_u128(acc);
}

}  // namespace

std::vector<uint64_t> power_residues(uint64_t m, uint64_t rho) {
  std::vector<uint64_t> out;
  out.reserve(rho);
  uint64_t r = 2 % m;
  for (uint64_t i = 0; i < rho; i++) {
    out.push_back(r);
    r <<= 1;
    if (r >= m) r -= m;
  }
  return out;
}

ResidueMultiset::ResidueMultiset(uint64_t modulus,
                                 const std::vector<uint64_t>& residues)
    : m_(modulus) {
  std::vector<uint64_t> sorted = residues;
  std::sort(sorted.begin(), sorted.end());
  for (uint64_t r : sorted) {
    if (r >= m_) throw invalid_input("ResidueMultiset: residue out of range");
    if (!sparse_.empty() && sparse_.back().first == r)
      sparse_.back().second += 1;
    else
      sparse_.emplace_back(r, 1);
  }
  if (sparse_.size() >= m_ / 4) densify();
}

void ResidueMultiset::densify() {
  if (dense_) return;
  if (m_ > kDenseMpzLimit)
    throw budget_exceeded("ResidueMultiset: modulus beyond dense budget");
  vec_.assign(m_, mpz_class(0));
  for (auto& [r, c] : sparse_) vec_[r] = std::move(c);
  sparse_.clear();
  sparse_.shrink_to_fit();
  dense_ = true;
}

void ResidueMultiset::convolve(const std::vector<uint64_t>& residues) {
  if (!dense_) {
    unsigned __int128 pairs =
        static_cast<unsigned __int128>(sparse_.size()) * residues.size();
    if (pairs > 400'000'000ull)
      throw budget_exceeded("ResidueMultiset: convolution beyond budget");
    std::vector<std::pair<uint64_t, mpz_class>> all;
    all.reserve(static_cast<size_t>(pairs));
    for (const auto& [r, c] : sparse_) {
      for (uint64_t s : residues) {
        uint64_t k = r + s;
        if (k >= m_) k -= m_;
        all.emplace_back(k, c);
      }
    }
    std::sort(all.begin(), all.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<uint64_t, mpz_class>> merged;
    for (auto& kv : all) {
      if (!merged.empty() && merged.back().first == kv.first)
        merged.back().second += kv.second;
      else
        merged.push_back(std::move(kv));
    }
    sparse_ = std::move(merged);
    if (sparse_.size() >= m_ / 4) densify();
    return;
  }
  std::vector<mpz_class> next(m_);
  for (uint64_t s : residues) {
    for (uint64_t j = s; j < m_; j++) next[j] += vec_[j - s];
    for (uint64_t j = 0; j < s; j++) next[j] += vec_[j + m_ - s];
  }
  vec_.swap(next);
}

mpz_class ResidueMultiset::mass() const {
  mpz_class acc(0);
  if (dense_) {
    for (const auto& v : vec_) acc += v;
  } else {
    for (const auto& [r, c] : sparse_) acc += c;
  }
  return acc;
}

mpz_class ResidueMultiset::sum_of_squares() const {
  mpz_class acc(0);
  if (dense_) {
    for (const auto& v : vec_) acc += v * v;
  } else {
    for (const auto& [r, c] : sparse_) acc += c * c;
  }
  return acc;
}

size_t ResidueMultiset::support() const {
  if (!dense_) return sparse_.size();
  return static_cast<size_t>(
      std::count_if(vec_.begin(), vec_.end(),
                    [](const mpz_class& v) { return v != 0; }));
}

mpz_class ResidueMultiset::count_at(uint64_t residue) const {
  if (residue >= m_) throw invalid_input("count_at: residue out of range");
  if (dense_) return vec_[residue];
  auto it = std::lower_bound(
      sparse_.begin(), sparse_.end(), residue,
      [](const auto& kv, uint64_t r) { return kv.first < r; });
  if (it != sparse_.end() && it->first == residue) return it->second;
  return 0;
}

mpz_class n_l_bruteforce(uint64_t m, unsigned l) {
  if (l < 1) throw invalid_input("N_l: l must be >= 1");
  uint64_t rho = order_of(m);
  if (pow_sat(rho, l, kBruteWorkLimit + 1) > kBruteWorkLimit)
    throw budget_exceeded("N_l brute force: enumeration beyond budget");
  auto residues = power_residues(m, rho);
  BruteCounts u = brute_block(m, l, residues);
  BruteCounts v = brute_block(m, l, residues);
  unsigned __int128 acc = 0;
  if (u.use_dense) {
    for (uint64_t r = 0; r < m; r++)
      acc += static_cast<unsigned __int128>(u.dense[r]) * v.dense[r];
  } else {
    for (const auto& [r, c] : u.sparse) {
      auto it = v.sparse.find(r);
      if (it != v.sparse.end())
        acc += static_cast<unsigned __int128>(c) * it->second;
    }
  }
  return mpz_from_u128(acc);
}

mpz_class n_l_convolution(uint64_t m, unsigned l) {
  if (l < 1) throw invalid_input("N_l: l must be >= 1");
  uint64_t rho = order_of(m);
  auto residues = power_residues(m, rho);
  uint64_t mass = pow_sat(rho, l, kU64SafeMass);
  // Square-and-multiply over the residue-sum convolution monoid.
  unsigned msb = 31 - __builtin_clz(l);
  if (mass < kU64SafeMass) {
    SparseU64 base;
    base.reserve(rho);
    for (uint64_t r : residues) base[r]++;
    SparseU64 cur = base;
    for (int bit = static_cast<int>(msb) - 1; bit >= 0; bit--) {
      cur = combine(cur, cur, m);
      if (l & (1u << bit)) cur = combine(cur, base, m);
    }
    return sum_squares_sparse(cur);
  }
  SparseMpz base;
  for (uint64_t r : residues) base[r] += 1;
  SparseMpz cur = base;
  for (int bit = static_cast<int>(msb) - 1; bit >= 0; bit--) {
    cur = combine(cur, cur, m);
    if (l & (1u << bit)) cur = combine(cur, base, m);
  }
  return sum_squares_sparse(cur);
}

mpz_class n_l_circulant(uint64_t m, unsigned l, unsigned threads) {
  if (l < 1) throw invalid_input("N_l: l must be >= 1");
  uint64_t rho = order_of(m);
  auto residues = power_residues(m, rho);
  uint64_t mass = pow_sat(rho, l, kU64SafeMass);
  if (mass < kU64SafeMass) {
    if (m > kDenseU64Limit)
      throw budget_exceeded("N_l circulant: modulus beyond dense budget");
    return n_l_circulant_u64(m, l, residues, threads);
  }
  return n_l_circulant_mpz(m, l, residues);
}

mpz_class n_l(uint64_t m, unsigned l, const NlOptions& opt) {
  switch (opt.algo) {
    case Algo::kBrute:
      return n_l_bruteforce(m, l);
    case Algo::kConv:
      return n_l_convolution(m, l);
    case Algo::kCirc:
      return n_l_circulant(m, l, opt.threads);
    case Algo::kAuto:
      break;
  }
  if (l < 1) throw invalid_input("N_l: l must be >= 1");
  uint64_t rho = order_of(m);
  auto residues = power_residues(m, rho);
  return n_l_auto(m, l, rho, residues, opt.threads);
}

struct NlEvaluator::Impl {
  uint64_t m;
  std::vector<uint64_t> residues;
  bool use_u64;
  // u64 sparse-then-dense state
  SparseU64 sbase, scur;
  std::vector<uint64_t> dcur;
  bool dense = false;
  // arbitrary-precision state
  std::unique_ptr<ResidueMultiset> ms;
};

NlEvaluator::NlEvaluator(uint64_t m, uint64_t rho, unsigned max_level)
    : impl_(std::make_shared<Impl>()) {
  impl_->m = m;
  impl_->residues = power_residues(m, rho);
  impl_->use_u64 = pow_sat(rho, max_level, kU64SafeMass) < kU64SafeMass;
  if (impl_->use_u64) {
    impl_->sbase.reserve(rho);
    for (uint64_t r : impl_->residues) impl_->sbase[r]++;
    impl_->scur = impl_->sbase;
  } else {
    impl_->ms = std::make_unique<ResidueMultiset>(m, impl_->residues);
  }
}

void NlEvaluator::advance() {
  Impl& im = *impl_;
  if (!im.use_u64) {
    im.ms->convolve(im.residues);
  } else if (!im.dense) {
    im.scur = combine(im.scur, im.sbase, im.m);
    if (im.scur.size() >= im.m / 4 && im.m <= kDenseU64Limit) {
      im.dcur.assign(im.m, 0);
      for (const auto& [r, v] : im.scur) im.dcur[r] = v;
      im.scur.clear();
      im.dense = true;
    }
  } else {
    std::vector<uint64_t> next(im.m);
    circulant_round_range(im.dcur, next, im.residues, im.m, 0, im.m);
    im.dcur.swap(next);
  }
  level_++;
}

mpz_class NlEvaluator::sum_of_squares() const {
  const Impl& im = *impl_;
  if (!im.use_u64) return im.ms->sum_of_squares();
  unsigned __int128 acc = 0;
  if (im.dense) {
    for (uint64_t v : im.dcur) acc += static_cast<unsigned __int128>(v) * v;
  } else {
    for (const auto& [r, v] : im.scur)
      acc += static_cast<unsigned __int128>(v) * v;
  }
  return mpz_from_u128(acc);
}

BigRational BetaRecord::beta() const {
  if (n_count <= 0) throw internal_error("BetaRecord: empty solution count");
  mpz_class num;
  mpz_ui_pow_ui(num.get_mpz_t(), rho, 2 * l);
  mpq_class q(num);
  q /= mpq_class(n_count);
  q.canonicalize();
  return q;
}

BetaRecord beta_l(unsigned f, uint64_t d, unsigned l, const NlOptions& opt) {
  if (f != 3 && f != 15) throw invalid_input("beta_l: f must be 3 or 15");
  if (l < 1) throw invalid_input("beta_l: l must be >= 1");
  if (d < 1) throw invalid_input("beta_l: d must be >= 1");
  if (d > 1) {
    auto fac = modmath::factorize(d);
    if (!fac.squarefree())
      throw invalid_input("beta_l: d must be square-free");
    if (fac.factors.front().prime <= 5)
      throw invalid_input("beta_l: prime factors of d must exceed 5");
  }
  unsigned __int128 m128 = static_cast<unsigned __int128>(f) * d;
  if (m128 >= (uint64_t(1) << 62))
    throw budget_exceeded("beta_l: modulus beyond supported range");
  uint64_t m = static_cast<uint64_t>(m128);
  BetaRecord rec;
  rec.f = f;
  rec.d = d;
  rec.l = l;
  rec.rho = modmath::mult_order2_u64(m);
  rec.n_count = n_l(m, l, opt);
  return rec;
}

}  // namespace linnik::beta
