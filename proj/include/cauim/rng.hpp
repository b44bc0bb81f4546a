#pragma once

// Counter-based random streams. Every random decision in the library is
// addressed by a key derived from the master seed plus a tuple of counters
// (round, step, node, ...), so results never depend on evaluation order or
// on how work is split between threads.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace cauim::rng {

// SplitMix64 finalizer.
constexpr std::uint64_t mix(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive(std::uint64_t key, std::uint64_t part) noexcept {
  return mix(key ^ mix(part + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t derive(std::uint64_t key, std::initializer_list<std::uint64_t> parts) noexcept {
  for (std::uint64_t p : parts) key = derive(key, p);
  return key;
}

// Maps 64 random bits to [0, 1) with 53-bit resolution.
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Sequential stream over a fixed key; the n-th draw is mix(key + n * gamma).
class Stream {
 public:
  constexpr explicit Stream(std::uint64_t key) noexcept : state_(key) {}

  constexpr std::uint64_t next() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  constexpr double uniform() noexcept { return to_unit(next()); }

  // Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
  }

  // Standard normal via Box-Muller (one value per call, the sine branch is dropped).
  double normal() noexcept {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t state_;
};

}  // namespace cauim::rng
