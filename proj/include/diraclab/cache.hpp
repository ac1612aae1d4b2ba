#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "diraclab/spectral.hpp"

namespace diraclab {

/// FNV-1a over a canonical string; used to key cache entries.
std::uint64_t fnv1a(const std::string& s);

/// Content-addressed store for eigendecompositions. Binary layout: magic,
/// version, key hash, N, dim, L, P, hbar, eigenvalues, eigenvectors
/// (column-major complex doubles). Writes are temp-then-rename so no partial
/// entry ever becomes visible; entries are immutable once written.
class EigenCache {
 public:
  explicit EigenCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  std::filesystem::path path_for(std::uint64_t key, int N) const;

  /// Load if present; CacheCorrupt on header/shape mismatch.
  std::optional<EigenDecomp> load(std::uint64_t key, const GridSpec& g) const;

  void store(std::uint64_t key, const EigenDecomp& d) const;

 private:
  std::filesystem::path dir_;
};

}  // namespace diraclab
