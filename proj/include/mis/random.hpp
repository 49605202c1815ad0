#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace mis {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z) noexcept;

/// Seed of stream `index` under `master`. A pure function of its arguments,
/// so replicate r always sees the same stream regardless of which worker
/// runs it or in which order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::uint64_t tag) noexcept;

/// FNV-1a, for turning stable labels into stream tags.
std::uint64_t hash_label(std::string_view label) noexcept;

/// Seeded random stream with a fixed consumption contract:
///   uniform()/uniform_open()  one engine word
///   normal()                  two engine words (Box-Muller, no caching)
///   index(n)                  zero words when n == 1, otherwise >= 1
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  double uniform() noexcept;       // [0, 1)
  double uniform_open() noexcept;  // (0, 1)
  double normal() noexcept;
  std::size_t index(std::size_t n) noexcept;

  std::mt19937_64& engine() noexcept { return engine_; }

  friend bool operator==(const RandomStream&, const RandomStream&) = default;

 private:
  std::mt19937_64 engine_;
};

}  // namespace mis
