#pragma once

// Portable random streams.
//
// Every random decision in the library is derived from a 64-bit seed through
// the SplitMix64 finalizer, so results do not depend on the standard library
// implementation. Pair-indexed decisions (edge sampling, adversary coin flips)
// use a counter-based stream: the uniform for the unordered pair {u, v} is
//
//     to_unit(mix64(stream_key ^ mix64((min(u,v) << 32) | max(u,v))))
//
// with stream_key = derive_seed(seed, tag). Each pair therefore owns an
// independent substream, and the outcome does not depend on visiting order.

#include <cstdint>
#include <limits>

namespace ppm {

constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a) noexcept {
  return mix64(base ^ mix64(a + 0x632BE59BD9B4E019ULL));
}

template <typename... Rest>
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b,
                                    Rest... rest) noexcept {
  return derive_seed(derive_seed(base, a), b, static_cast<std::uint64_t>(rest)...);
}

/// Top 53 bits mapped to [0, 1).
constexpr double to_unit(std::uint64_t x) noexcept {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

/// Tags separating the independent streams drawn from one user seed.
enum class Stream : std::uint64_t {
  kEdges = 1,
  kAdversaryPairs = 2,
  kAdversaryChoice = 3,
  kDominate = 4,
  kTrial = 5,
  kTails = 6,
};

class PairStream {
 public:
  PairStream(std::uint64_t seed, Stream tag) noexcept
      : key_(derive_seed(seed, static_cast<std::uint64_t>(tag))) {}

  double uniform(int u, int v) const noexcept {
    const auto lo = static_cast<std::uint64_t>(u < v ? u : v);
    const auto hi = static_cast<std::uint64_t>(u < v ? v : u);
    return to_unit(mix64(key_ ^ mix64((lo << 32) | hi)));
  }

 private:
  std::uint64_t key_;
};

/// Sequential SplitMix64 generator; satisfies UniformRandomBitGenerator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}
  SplitMix64(std::uint64_t seed, Stream tag) noexcept
      : state_(derive_seed(seed, static_cast<std::uint64_t>(tag))) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    const std::uint64_t out = mix64(state_);
    state_ += 0x9E3779B97F4A7C15ULL;
    return out;
  }

  double uniform01() noexcept { return to_unit((*this)()); }

  // Unbiased integer in [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound) noexcept {
    if (bound <= 1) return 0;
    const std::uint64_t limit = max() - max() % bound;
    std::uint64_t x;
    do {
      x = (*this)();
    } while (x >= limit);
    return x % bound;
  }

 private:
  std::uint64_t state_;
};

}  // namespace ppm
