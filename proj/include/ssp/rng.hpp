#pragma once

#include <cmath>
#include <cstdint>

namespace ssp {

// Counter-based pseudorandom generator.
//
// Output t of the stream identified by (seed, stream) is
//   finalize(key + t * 0x9E3779B97F4A7C15)  with  key = mix(seed, stream),
// where finalize is the SplitMix64 output function (Steele, Lea, Flood 2014).
// State is just (key, counter), so streams derived from the same seed but
// different stream ids are independent, draws are reproducible across
// platforms, and a generator can be copied or stored cheaply.
class Rng {
 public:
  Rng() : Rng(0, 0) {}
  Rng(std::uint64_t seed, std::uint64_t stream) : key_(mix(seed, stream)) {}

  std::uint64_t next_u64() {
    counter_ += kGolden;
    return finalize(key_ + counter_);
  }

  // Uniform in [0, 1), 53 mantissa bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in {0, ..., n-1}; modulo bias removed by rejection.
  std::uint64_t uniform_below(std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % n;
  }

  // Standard normal via Box-Muller (deterministic: consumes two draws).
  double next_normal() {
    const double u1 = 1.0 - next_double();  // (0, 1]
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  // Key-derivation helper, also used to derive per-replication seeds.
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    return finalize(finalize(a + kGolden) + b * 0xBF58476D1CE4E5B9ull + kGolden);
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

  static std::uint64_t finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace ssp
