#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace kgpathrl {

// splitmix64 finalizer; used to derive independent streams from (seed, index).
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// FNV-1a, stable across platforms (std::hash is not).
constexpr std::uint64_t fnv1a(std::string_view s,
                              std::uint64_t h = 0xcbf29ce484222325ULL) noexcept {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Seeded random source. Only the raw mt19937_64 sequence is used; the
// bounded-integer and real conversions below are implemented here so output
// is identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  // Independent stream for work item `index` under a run seed.
  static Rng stream(std::uint64_t seed, std::uint64_t index) {
    return Rng(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
  }

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % bound;
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool coin() { return (next() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace kgpathrl
