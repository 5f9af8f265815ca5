#include <cstdint>
#include <fstream>
#include <sstream>

#include "linnik/common.hpp"
#include "linnik/pipeline.hpp"

namespace linnik::pipeline {

namespace {

constexpr const char* kHeader = "linnik-beta-cache 1";

uint64_t fnv1a64(const std::string& data) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string record_line(const beta::BetaRecord& r) {
  std::ostringstream os;
  os << r.f << ' ' << r.d << ' ' << r.l << ' ' << r.rho << ' '
     << r.n_count.get_str() << '\n';
  return os.str();
}

}  // namespace

BetaCache::BetaCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  if (!dir_.empty()) load();
}

std::filesystem::path BetaCache::file_path() const {
  return dir_ / "beta.cache";
}

void BetaCache::load() {
  std::filesystem::create_directories(dir_);
  std::ifstream in(file_path());
  if (!in) return;  // no cache yet

  std::string line;
  if (!std::getline(in, line) || line != kHeader)
    throw cache_corrupt("beta cache: bad or missing header");
  std::string body = std::string(kHeader) + "\n";
  std::vector<std::string> lines;
  bool saw_checksum = false;
  while (std::getline(in, line)) {
    if (line.rfind("checksum ", 0) == 0) {
      uint64_t expect = 0;
      std::istringstream cs(line.substr(9));
      std::string algo;
      cs >> algo >> std::hex >> expect;
      if (algo != "fnv1a64" || !cs)
        throw cache_corrupt("beta cache: malformed checksum line");
      if (fnv1a64(body) != expect)
        throw cache_corrupt("beta cache: checksum mismatch");
      saw_checksum = true;
      break;
    }
    lines.push_back(line);
    body += line + "\n";
  }
  if (!saw_checksum) throw cache_corrupt("beta cache: missing checksum line");

  for (const std::string& rl : lines) {
    std::istringstream rs(rl);
    beta::BetaRecord rec;
    std::string n_str;
    if (!(rs >> rec.f >> rec.d >> rec.l >> rec.rho >> n_str))
      throw cache_corrupt("beta cache: malformed record: " + rl);
    rec.n_count = mpz_class(n_str);
    map_[{rec.f, rec.d, rec.l}] = rec;
  }
}

std::optional<beta::BetaRecord> BetaCache::get(unsigned f, uint64_t d,
                                               unsigned l) const {
  auto it = map_.find({f, d, l});
  if (it == map_.end()) return std::nullopt;
  hits_.fetch_add(1, std::memory_order_relaxed);
  return it->second;
}

void BetaCache::put(const beta::BetaRecord& rec) {
  auto key = std::make_tuple(rec.f, rec.d, rec.l);
  auto it = map_.find(key);
  if (it != map_.end()) {
    if (it->second.rho != rec.rho || it->second.n_count != rec.n_count)
      throw internal_error("beta cache: conflicting value for (" +
                           std::to_string(rec.f) + ", " +
                           std::to_string(rec.d) + ", " +
                           std::to_string(rec.l) + ")");
    return;
  }
  map_.emplace(key, rec);
  dirty_ = true;
}

void BetaCache::flush() {
  if (dir_.empty() || !dirty_) return;
  std::string body = std::string(kHeader) + "\n";
  for (const auto& [key, rec] : map_) body += record_line(rec);
  char cs[32];
  std::snprintf(cs, sizeof cs, "%016llx",
                static_cast<unsigned long long>(fnv1a64(body)));
  body += std::string("checksum fnv1a64 ") + cs + "\n";

  std::filesystem::create_directories(dir_);
  auto tmp = file_path();
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
    out << body;
    if (!out) throw internal_error("beta cache: write failed");
  }
  std::filesystem::rename(tmp, file_path());
  dirty_ = false;
}

}  // namespace linnik::pipeline
