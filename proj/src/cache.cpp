#include "dense/cache.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <functional>
#include <iterator>
#include <string>
#include <thread>

#include <unistd.h>

#include "dense/errors.hpp"

namespace dense::cache {

namespace {

static_assert(std::endian::native == std::endian::little, "cache codec assumes little-endian host");

template <typename T>
void put(std::vector<std::uint8_t>& out, T v) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
  out.insert(out.end(), p, p + sizeof(T));
}

template <typename T>
T get(std::span<const std::uint8_t> bytes, std::size_t& pos) {
  T v;
  std::memcpy(&v, bytes.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

}  // namespace

std::uint64_t checksum(std::span<const std::uint8_t> bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::vector<std::uint8_t> encode(const SieveSegment& segment) {
  const std::size_t n = segment.size();
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + n * 20 + 8);
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put(out, kFormatVersion);
  put(out, segment.lo);
  put(out, segment.hi);
  for (std::uint32_t v : segment.spf) put(out, v);
  for (std::uint64_t v : segment.phi) put(out, v);
  for (std::uint64_t v : segment.lambda) put(out, v);
  put(out, checksum(out));
  return out;
}

SieveSegment decode(std::span<const std::uint8_t> bytes, std::uint64_t segment_index) {
  auto fail = [&](const std::string& why) {
    return integrity_error("cache segment " + std::to_string(segment_index) + ": " + why, segment_index);
  };
  if (bytes.size() < kHeaderSize + 8) throw fail("truncated header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw fail("bad magic");
  const std::size_t body = bytes.size() - 8;
  std::size_t pos = body;
  if (get<std::uint64_t>(bytes, pos) != checksum(bytes.first(body))) throw fail("checksum mismatch");

  pos = 4;
  if (get<std::uint32_t>(bytes, pos) != kFormatVersion) throw fail("unsupported format version");
  SieveSegment s;
  s.lo = get<std::uint64_t>(bytes, pos);
  s.hi = get<std::uint64_t>(bytes, pos);
  if (s.hi < s.lo) throw fail("hi below lo");
  const std::uint64_t n = s.hi - s.lo;
  if (body != kHeaderSize + n * 20) throw fail("length does not match range");
  s.spf.resize(n);
  s.phi.resize(n);
  s.lambda.resize(n);
  std::memcpy(s.spf.data(), bytes.data() + pos, n * 4);
  pos += n * 4;
  std::memcpy(s.phi.data(), bytes.data() + pos, n * 8);
  pos += n * 8;
  std::memcpy(s.lambda.data(), bytes.data() + pos, n * 8);
  return s;
}

std::filesystem::path segment_file(const std::filesystem::path& dir, std::uint64_t lo,
                                   std::uint64_t hi) {
  return dir / ("seg_" + std::to_string(lo) + "_" + std::to_string(hi) + ".tdsv");
}

void write(const std::filesystem::path& dir, const SieveSegment& segment) {
  std::filesystem::create_directories(dir);
  const auto path = segment_file(dir, segment.lo, segment.hi);
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." +
         std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  const auto bytes = encode(segment);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

SieveSegment read(const std::filesystem::path& dir, std::uint64_t lo, std::uint64_t hi,
                  std::uint64_t segment_index) {
  const auto path = segment_file(dir, lo, hi);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw not_found_error("no cached segment [" + std::to_string(lo) + ", " + std::to_string(hi) + ")");
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0, std::ios::beg);
  std::vector<std::uint8_t> bytes(size);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
  if (!in) throw integrity_error("cache segment " + std::to_string(segment_index) + ": short read", segment_index);
  SieveSegment s = decode(bytes, segment_index);
  if (s.lo != lo || s.hi != hi)
    throw integrity_error("cache segment " + std::to_string(segment_index) + ": range mismatch",
                          segment_index);
  return s;
}

}  // namespace dense::cache
