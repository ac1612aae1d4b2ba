#include "diraclab/cache.hpp"

#include <cstdio>
#include <fstream>

#include "diraclab/errors.hpp"

namespace diraclab {

namespace {
constexpr std::uint32_t kMagic = 0x444c4543u;  // "DLEC"
constexpr std::uint32_t kVersion = 1;

struct Header {
  std::uint32_t magic = kMagic;
  std::uint32_t version = kVersion;
  std::uint64_t key = 0;
  std::int32_t N = 0;
  std::int32_t dim = 0;
  double L = 0, P = 0, hbar = 0;
};
}  // namespace

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::filesystem::path EigenCache::path_for(std::uint64_t key, int N) const {
  char name[64];
  std::snprintf(name, sizeof(name), "%016llx_N%02d.eig", static_cast<unsigned long long>(key), N);
  return dir_ / name;
}

std::optional<EigenDecomp> EigenCache::load(std::uint64_t key, const GridSpec& g) const {
  const auto path = path_for(key, g.N);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;

  Header h;
  in.read(reinterpret_cast<char*>(&h), sizeof(h));
  if (!in || h.magic != kMagic) throw CacheCorrupt("bad magic in " + path.string());
  if (h.version != kVersion) throw CacheCorrupt("unsupported cache version in " + path.string());
  if (h.key != key || h.N != g.N || h.dim != g.dim() || h.L != g.L || h.P != g.P)
    throw CacheCorrupt("header/key mismatch in " + path.string());

  EigenDecomp d;
  d.g = g;
  d.evals.resize(h.dim);
  d.evecs.resize(h.dim, h.dim);
  in.read(reinterpret_cast<char*>(d.evals.data()), sizeof(double) * h.dim);
  in.read(reinterpret_cast<char*>(d.evecs.data()),
          sizeof(cplx) * static_cast<std::streamsize>(h.dim) * h.dim);
  if (!in) throw CacheCorrupt("truncated cache entry " + path.string());
  return d;
}

void EigenCache::store(std::uint64_t key, const EigenDecomp& d) const {
  std::filesystem::create_directories(dir_);
  const auto path = path_for(key, d.g.N);
  if (std::filesystem::exists(path)) return;  // immutable once written
  const auto tmp = path.string() + ".tmp";

  Header h;
  h.key = key;
  h.N = d.g.N;
  h.dim = d.dim();
  h.L = d.g.L;
  h.P = d.g.P;
  h.hbar = d.g.hbar();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot open " + tmp);
    out.write(reinterpret_cast<const char*>(&h), sizeof(h));
    out.write(reinterpret_cast<const char*>(d.evals.data()), sizeof(double) * h.dim);
    out.write(reinterpret_cast<const char*>(d.evecs.data()),
              sizeof(cplx) * static_cast<std::streamsize>(h.dim) * h.dim);
    if (!out) throw IoFailure("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace diraclab
