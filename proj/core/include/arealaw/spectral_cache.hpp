#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "arealaw/hamiltonian.hpp"
#include "arealaw/spectra.hpp"

namespace arealaw {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(const void* data, std::size_t size);
Digest sha256_file(const std::filesystem::path& path);
std::string to_hex(const Digest& d);

/// Content key of (lattice, region, term list, mode).
Digest spectral_key(const Lattice& lattice, const Region& region,
                    const std::vector<LocalTerm>& terms, const std::string& mode);

/// Decoded cache file.
struct CacheRecord {
  Digest key{};
  std::uint32_t flags = 0;
  LatticeSpec lattice;
  std::vector<Site> region;
  std::vector<LocalTerm> terms;
  SpectralData spectrum;
};

/// Binary layout (little-endian): magic "ARLWSPEC", u32 version, u32 flags,
/// 32-byte key, lattice, region, terms, u64 dim, u64 count, eigenvalues (f64),
/// eigenvectors (complex f64 pairs, column-major), SHA-256 of everything before.
void write_cache_file(const std::filesystem::path& path, const CacheRecord& record);
CacheRecord read_cache_file(const std::filesystem::path& path);

struct CacheEntryInfo {
  std::filesystem::path path;
  std::string key;
  std::uint64_t dim = 0;
  std::uint64_t count = 0;
  std::uintmax_t bytes = 0;
};

struct CacheVerifyResult {
  std::filesystem::path path;
  bool ok = false;
  double residual = 0.0;
  std::string message;
};

/// On-disk spectra. Reads may run concurrently; writes are serialized per key
/// and published by atomic rename.
class SpectralCache {
 public:
  explicit SpectralCache(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }

  /// Full spectrum of H_region, loaded from disk when present.
  SpectralData region_spectrum(const LocalHamiltonian& h, const Region& region,
                               int dense_cap = kDefaultDenseCap);

  std::vector<CacheEntryInfo> list() const;
  std::vector<CacheVerifyResult> verify() const;
  std::size_t clear();

  std::size_t hits() const;
  std::size_t misses() const;

 private:
  std::shared_ptr<std::mutex> key_mutex(const std::string& key);

  std::filesystem::path dir_;
  mutable std::mutex state_mutex_;
  std::map<std::string, std::shared_ptr<std::mutex>> key_mutexes_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

}  // namespace arealaw
