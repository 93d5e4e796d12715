#pragma once

#include <cstdint>

namespace ucantor {

// Counter-based randomness built on the splitmix64 finalizer. Every draw is a
// pure function of (key, stream), so random trees can assign one key per
// vertex and reproduce bit-identically regardless of traversal order or
// platform. No libstdc++ distribution objects are used on sampling paths for
// the same reason: their output is implementation-defined.

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// One 64-bit draw from the given key on the given stream.
constexpr std::uint64_t rng_draw(std::uint64_t key, std::uint64_t stream) noexcept {
  return mix64(key ^ (0x632be59bd9b4e019ull * (stream + 1)));
}

/// Key for the index-th child of a vertex keyed by parent_key.
constexpr std::uint64_t child_key(std::uint64_t parent_key, std::uint32_t index) noexcept {
  return mix64(parent_key + 0x9e3779b97f4a7c15ull * (static_cast<std::uint64_t>(index) + 2));
}

/// Map 64 random bits to (0, 1]; never returns 0.
inline double unit_open(std::uint64_t bits) noexcept {
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

/// Map 64 random bits to [0, 1).
inline double unit_halfopen(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Sequential splitmix64 stream for tests and ad-hoc sampling.
class SplitMix {
 public:
  explicit SplitMix(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  double next_unit() noexcept { return unit_halfopen(next()); }

  /// Uniform integer in [0, n); unbiased via rejection.
  std::uint64_t next_below(std::uint64_t n) noexcept {
    if (n < 2) return 0;
    const std::uint64_t limit = n * (~0ull / n);
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::uint64_t state_;
};

}  // namespace ucantor
