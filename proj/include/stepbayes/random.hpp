#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace stepbayes {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// FNV-1a hash of a component name; stable across builds.
constexpr std::uint64_t stream_tag(std::string_view name) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// Seed for replicate `index` of the component named by `tag`.
///
/// Every stochastic routine that needs more than one stream derives them
/// through this function, so a single user seed reproduces a whole run and
/// replicates can be evaluated in any order.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag,
                                    std::uint64_t index = 0) noexcept {
  return mix64(mix64(seed ^ mix64(tag)) + mix64(index));
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view name,
                                    std::uint64_t index = 0) noexcept {
  return derive_seed(seed, stream_tag(name), index);
}

/// Uniform draw on the open interval (0,1) with 53 random bits.
inline double uniform_open(Rng& rng) noexcept {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

/// Uniform draw on [0,1).
inline double uniform_unit(Rng& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double standard_exponential(Rng& rng) noexcept {
  return -std::log(uniform_open(rng));
}

inline std::size_t poisson_draw(Rng& rng, double mean) {
  if (mean <= 0.0) return 0;
  std::poisson_distribution<std::int64_t> dist(mean);
  return static_cast<std::size_t>(dist(rng));
}

}  // namespace stepbayes
