#include "arealaw/spectral_cache.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#include "arealaw/errors.hpp"

namespace arealaw {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[8] = {'A', 'R', 'L', 'W', 'S', 'P', 'E', 'C'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kFlagLowestK = 1;
constexpr const char* kExtension = ".spec";

class ByteWriter {
 public:
  template <typename T>
  void put(T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char raw[sizeof(T)];
    std::memcpy(raw, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
    bytes_.insert(bytes_.end(), raw, raw + sizeof(T));
  }
  void put_bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    bytes_.insert(bytes_.end(), p, p + n);
  }
  void put_complex(cplx z) {
    put(z.real());
    put(z.imag());
  }
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  ByteReader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}
  template <typename T>
  T get() {
    need(sizeof(T));
    unsigned char raw[sizeof(T)];
    std::memcpy(raw, data_ + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
    pos_ += sizeof(T);
    T value;
    std::memcpy(&value, raw, sizeof(T));
    return value;
  }
  void get_bytes(void* out, std::size_t n) {
    need(n);
    std::memcpy(out, data_ + pos_, n);
    pos_ += n;
  }
  cplx get_complex() {
    const double re = get<double>();
    const double im = get<double>();
    return {re, im};
  }
  std::size_t position() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > size_) throw CorruptError("cache file truncated");
  }
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

void put_problem(ByteWriter& w, const LatticeSpec& lattice, const std::vector<Site>& region,
                 const std::vector<LocalTerm>& terms) {
  w.put<std::uint32_t>(static_cast<std::uint32_t>(lattice.s));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(lattice.q));
  for (int e : lattice.extents) w.put<std::uint32_t>(static_cast<std::uint32_t>(e));
  for (Boundary b : lattice.boundary) w.put<std::uint8_t>(b == Boundary::periodic ? 1 : 0);
  w.put<std::uint64_t>(region.size());
  for (Site x : region) w.put<std::uint32_t>(static_cast<std::uint32_t>(x));
  w.put<std::uint64_t>(terms.size());
  for (const auto& t : terms) {
    w.put<std::uint32_t>(static_cast<std::uint32_t>(t.anchor));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(t.support.size()));
    for (Site y : t.support) w.put<std::uint32_t>(static_cast<std::uint32_t>(y));
    w.put<std::uint64_t>(static_cast<std::uint64_t>(t.op.rows()));
    for (Index i = 0; i < t.op.rows(); ++i)
      for (Index j = 0; j < t.op.cols(); ++j) w.put_complex(t.op(i, j));
  }
}

void get_problem(ByteReader& r, CacheRecord& rec) {
  rec.lattice.s = static_cast<int>(r.get<std::uint32_t>());
  rec.lattice.q = static_cast<int>(r.get<std::uint32_t>());
  if (rec.lattice.s < 1 || rec.lattice.s > 8) throw CorruptError("cache file: bad lattice rank");
  for (int a = 0; a < rec.lattice.s; ++a) {
    rec.lattice.extents.push_back(static_cast<int>(r.get<std::uint32_t>()));
  }
  for (int a = 0; a < rec.lattice.s; ++a) {
    rec.lattice.boundary.push_back(r.get<std::uint8_t>() ? Boundary::periodic : Boundary::open);
  }
  const auto nregion = r.get<std::uint64_t>();
  if (nregion > 64) throw CorruptError("cache file: implausible region size");
  for (std::uint64_t i = 0; i < nregion; ++i) {
    rec.region.push_back(static_cast<Site>(r.get<std::uint32_t>()));
  }
  const auto nterms = r.get<std::uint64_t>();
  if (nterms > 1'000'000) throw CorruptError("cache file: implausible term count");
  for (std::uint64_t i = 0; i < nterms; ++i) {
    LocalTerm t;
    t.anchor = static_cast<Site>(r.get<std::uint32_t>());
    const auto ns = r.get<std::uint32_t>();
    if (ns > 64) throw CorruptError("cache file: implausible support size");
    for (std::uint32_t k = 0; k < ns; ++k) t.support.push_back(static_cast<Site>(r.get<std::uint32_t>()));
    const auto d = static_cast<Index>(r.get<std::uint64_t>());
    if (d > 4096) throw CorruptError("cache file: implausible term dimension");
    t.op.resize(d, d);
    for (Index a = 0; a < d; ++a)
      for (Index b = 0; b < d; ++b) t.op(a, b) = r.get_complex();
    rec.terms.push_back(std::move(t));
  }
}

std::vector<std::uint8_t> read_all(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorruptError("cannot open cache file " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

Digest sha256(const void* data, std::size_t size) {
  Digest out{};
  unsigned int len = 0;
  if (EVP_Digest(data, size, out.data(), &len, EVP_sha256(), nullptr) != 1 || len != out.size()) {
    throw NumericError("SHA-256 computation failed");
  }
  return out;
}

Digest sha256_file(const fs::path& path) {
  const auto bytes = read_all(path);
  return sha256(bytes.data(), bytes.size());
}

std::string to_hex(const Digest& d) {
  static constexpr char hex[] = "0123456789abcdef";
  std::string s;
  s.reserve(64);
  for (auto b : d) {
    s.push_back(hex[b >> 4]);
    s.push_back(hex[b & 15]);
  }
  return s;
}

Digest spectral_key(const Lattice& lattice, const Region& region,
                    const std::vector<LocalTerm>& terms, const std::string& mode) {
  ByteWriter w;
  w.put_bytes(mode.data(), mode.size());
  w.put<std::uint8_t>(0);
  put_problem(w, lattice.spec(), region.sites(), terms);
  return sha256(w.bytes().data(), w.bytes().size());
}

void write_cache_file(const fs::path& path, const CacheRecord& record) {
  ByteWriter w;
  w.put_bytes(kMagic, sizeof(kMagic));
  w.put<std::uint32_t>(kVersion);
  w.put<std::uint32_t>(record.flags);
  w.put_bytes(record.key.data(), record.key.size());
  put_problem(w, record.lattice, record.region, record.terms);
  const auto& spec = record.spectrum;
  w.put<std::uint64_t>(static_cast<std::uint64_t>(spec.dim()));
  w.put<std::uint64_t>(static_cast<std::uint64_t>(spec.size()));
  for (Index i = 0; i < spec.size(); ++i) w.put(spec.values(i));
  for (Index j = 0; j < spec.vectors.cols(); ++j)
    for (Index i = 0; i < spec.vectors.rows(); ++i) w.put_complex(spec.vectors(i, j));
  const Digest check = sha256(w.bytes().data(), w.bytes().size());
  w.put_bytes(check.data(), check.size());

  std::ostringstream suffix;
  suffix << ".tmp." << std::this_thread::get_id();
  fs::path tmp = path;
  tmp += suffix.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CorruptError("cannot write cache file " + tmp.string());
    out.write(reinterpret_cast<const char*>(w.bytes().data()),
              static_cast<std::streamsize>(w.bytes().size()));
    if (!out) throw CorruptError("short write to cache file " + tmp.string());
  }
  fs::rename(tmp, path);
}

CacheRecord read_cache_file(const fs::path& path) {
  const auto bytes = read_all(path);
  if (bytes.size() < sizeof(kMagic) + 8 + 32 + 32) throw CorruptError("cache file truncated");
  const std::size_t body = bytes.size() - 32;
  const Digest check = sha256(bytes.data(), body);
  if (std::memcmp(check.data(), bytes.data() + body, 32) != 0) {
    throw CorruptError("cache file checksum mismatch");
  }
  ByteReader r(bytes.data(), body);
  char magic[8];
  r.get_bytes(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw CorruptError("bad cache magic");
  if (r.get<std::uint32_t>() != kVersion) throw CorruptError("unsupported cache version");
  CacheRecord rec;
  rec.flags = r.get<std::uint32_t>();
  r.get_bytes(rec.key.data(), rec.key.size());
  get_problem(r, rec);
  const auto dim = r.get<std::uint64_t>();
  const auto count = r.get<std::uint64_t>();
  if (count > dim || dim > (1ULL << 16)) throw CorruptError("cache file: implausible dimensions");
  auto& spec = rec.spectrum;
  spec.completeness = (rec.flags & kFlagLowestK) ? Completeness::lowest_k : Completeness::full;
  spec.values.resize(static_cast<Index>(count));
  for (Index i = 0; i < spec.values.size(); ++i) spec.values(i) = r.get<double>();
  spec.vectors.resize(static_cast<Index>(dim), static_cast<Index>(count));
  for (Index j = 0; j < spec.vectors.cols(); ++j)
    for (Index i = 0; i < spec.vectors.rows(); ++i) spec.vectors(i, j) = r.get_complex();
  if (r.position() != body) throw CorruptError("cache file has trailing bytes");
  return rec;
}

SpectralCache::SpectralCache(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

std::shared_ptr<std::mutex> SpectralCache::key_mutex(const std::string& key) {
  std::lock_guard lock(state_mutex_);
  auto& m = key_mutexes_[key];
  if (!m) m = std::make_shared<std::mutex>();
  return m;
}

SpectralData SpectralCache::region_spectrum(const LocalHamiltonian& h, const Region& region,
                                            int dense_cap) {
  const auto terms = terms_inside(h, region);
  const Digest key = spectral_key(h.lattice(), region, terms, "full");
  const std::string hex = to_hex(key);
  const fs::path path = dir_ / (hex + kExtension);
  const auto source = "H_" + region.describe();

  auto try_load = [&]() -> std::optional<SpectralData> {
    if (!fs::exists(path)) return std::nullopt;
    CacheRecord rec = read_cache_file(path);
    if (rec.key != key) throw CorruptError("cache key mismatch in " + path.string());
    const Matrix m = assemble(terms, region.sites(), h.lattice().q(), dense_cap);
    const auto res = spectral_residuals(m, rec.spectrum);
    const double scale = std::max(1.0, rec.spectrum.values.cwiseAbs().maxCoeff());
    if (res.residual > 1e-8 * scale || res.orthonormality > 1e-8) {
      throw CorruptError("cached spectrum fails its residual check: " + path.string());
    }
    rec.spectrum.source = source;
    return std::move(rec.spectrum);
  };

  if (auto hit = try_load()) {
    std::lock_guard lock(state_mutex_);
    ++hits_;
    return *hit;
  }
  auto guard = key_mutex(hex);
  std::lock_guard write_lock(*guard);
  if (auto hit = try_load()) {
    std::lock_guard lock(state_mutex_);
    ++hits_;
    return *hit;
  }
  SpectralData spec =
      diagonalize(assemble(terms, region.sites(), h.lattice().q(), dense_cap), source);
  CacheRecord rec;
  rec.key = key;
  rec.lattice = h.lattice().spec();
  rec.region = region.sites();
  rec.terms = terms;
  rec.spectrum = spec;
  write_cache_file(path, rec);
  std::lock_guard lock(state_mutex_);
  ++misses_;
  return spec;
}

std::vector<CacheEntryInfo> SpectralCache::list() const {
  std::vector<CacheEntryInfo> out;
  if (!fs::exists(dir_)) return out;
  for (const auto& entry : fs::directory_iterator(dir_)) {
    if (!entry.is_regular_file() || entry.path().extension() != kExtension) continue;
    CacheEntryInfo info;
    info.path = entry.path();
    info.key = entry.path().stem().string();
    info.bytes = entry.file_size();
    try {
      const CacheRecord rec = read_cache_file(entry.path());
      info.dim = static_cast<std::uint64_t>(rec.spectrum.dim());
      info.count = static_cast<std::uint64_t>(rec.spectrum.size());
    } catch (const Error&) {
      info.dim = info.count = 0;
    }
    out.push_back(std::move(info));
  }
  std::sort(out.begin(), out.end(),
            [](const CacheEntryInfo& a, const CacheEntryInfo& b) { return a.key < b.key; });
  return out;
}

std::vector<CacheVerifyResult> SpectralCache::verify() const {
  std::vector<CacheVerifyResult> out;
  for (const auto& info : list()) {
    CacheVerifyResult res;
    res.path = info.path;
    try {
      const CacheRecord rec = read_cache_file(info.path);
      if (to_hex(rec.key) != info.key) throw CorruptError("file name does not match its key");
      const Lattice lattice(rec.lattice);
      const Region region(lattice, rec.region);
      const Digest key = spectral_key(lattice, region, rec.terms,
                                      (rec.flags & kFlagLowestK) ? "lowest" : "full");
      if (key != rec.key) throw CorruptError("stored problem does not hash to its key");
      const Matrix m = assemble(rec.terms, region.sites(), lattice.q(), 16);
      const auto r = spectral_residuals(m, rec.spectrum);
      res.residual = r.residual;
      const double scale = std::max(1.0, rec.spectrum.values.cwiseAbs().maxCoeff());
      res.ok = r.residual <= 1e-8 * scale && r.orthonormality <= 1e-8;
      res.message = res.ok ? "ok" : "residual check failed";
    } catch (const std::exception& e) {
      res.ok = false;
      res.message = std::string("corrupt: ") + e.what();
    }
    out.push_back(std::move(res));
  }
  return out;
}

std::size_t SpectralCache::clear() {
  std::size_t removed = 0;
  for (const auto& info : list()) removed += fs::remove(info.path) ? 1 : 0;
  return removed;
}

std::size_t SpectralCache::hits() const {
  std::lock_guard lock(state_mutex_);
  return hits_;
}

std::size_t SpectralCache::misses() const {
  std::lock_guard lock(state_mutex_);
  return misses_;
}

}  // namespace arealaw
