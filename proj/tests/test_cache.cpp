#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <unistd.h>

#include "dense/cache.hpp"
#include "dense/errors.hpp"
#include "dense/sieve.hpp"

using namespace dense;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("dense_cache_test_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("encode layout") {
  const auto seg = sieve_segment(1, 5);
  const auto bytes = cache::encode(seg);
  CHECK(bytes.size() == cache::kHeaderSize + 4 * (4 + 8 + 8) + 8);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "TDSV");
  CHECK(bytes[4] == 1);
  CHECK(bytes[8] == 1);   // lo
  CHECK(bytes[16] == 5);  // hi
  // spf row for n = 2 follows the n = 1 sentinel.
  CHECK(bytes[cache::kHeaderSize] == 0);
  CHECK(bytes[cache::kHeaderSize + 4] == 2);
}

TEST_CASE("roundtrip and corruption detection") {
  TempDir dir;
  const auto seg = sieve_segment(0, 1 << 16);
  cache::write(dir.path, seg);
  CHECK(cache::read(dir.path, 0, 1 << 16) == seg);

  const auto file = cache::segment_file(dir.path, 0, 1 << 16);
  std::vector<char> raw(fs::file_size(file));
  std::ifstream(file, std::ios::binary).read(raw.data(), static_cast<std::streamsize>(raw.size()));
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    auto bad = raw;
    const auto pos = rng() % bad.size();
    bad[pos] = static_cast<char>(bad[pos] ^ (1 + rng() % 255));
    std::ofstream(file, std::ios::binary | std::ios::trunc).write(bad.data(), static_cast<std::streamsize>(bad.size()));
    try {
      cache::read(dir.path, 0, 1 << 16, 17);
      FAIL("corruption at byte " << pos << " not detected");
    } catch (const integrity_error& e) {
      CHECK(e.segment_index() == 17);
    }
  }
  // Truncated file.
  std::ofstream(file, std::ios::binary | std::ios::trunc).write(raw.data(), 100);
  CHECK_THROWS_AS(cache::read(dir.path, 0, 1 << 16), integrity_error);
}

TEST_CASE("missing segment") {
  TempDir dir;
  CHECK_THROWS_AS(cache::read(dir.path, 5, 10), not_found_error);
}

TEST_CASE("sieve through the cache") {
  TempDir dir;
  SieveConfig cfg;
  cfg.limit = 30000;
  cfg.segment_length = 4096;
  cfg.cache_path = dir.path;
  std::vector<SieveSegment> first, second;
  const auto s1 = iterate_segments(cfg, [&](const SieveSegment& s) { first.push_back(s); });
  CHECK(s1.cache_writes == s1.segments_total);
  CHECK(s1.cache_hits == 0);
  const auto s2 = iterate_segments(cfg, [&](const SieveSegment& s) { second.push_back(s); });
  CHECK(s2.cache_hits == s2.segments_total);
  CHECK(first == second);

  // Corrupt one file: the engine reports the segment index.
  const auto file = cache::segment_file(dir.path, 1 + 2 * 4096, 1 + 3 * 4096);
  REQUIRE(fs::exists(file));
  {
    std::fstream f(file, std::ios::binary | std::ios::in | std::ios::out);
    f.seekp(40);
    f.put('\x7f');
  }
  try {
    iterate_segments(cfg, [](const SieveSegment&) {});
    FAIL("expected integrity error");
  } catch (const integrity_error& e) {
    CHECK(e.segment_index() == 2);
  }
}
