#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace ntc {

// Splittable stream built on the splitmix64 finalizer (Steele, Lea, Flood;
// Vigna's fixed-increment variant). Substreams are derived by hashing tags
// into the state, so the stream for a given (sweep, mode, iteration, row)
// is the same no matter which thread runs it or in which order.
class RngStream {
public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  // Derived independent stream; does not advance this one.
  RngStream fork(std::uint64_t tag) const {
    return RngStream(mix(state_ ^ (0x9e3779b97f4a7c15ull * (tag + 1))));
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  // Uniform on [0, 1), 53 bits.
  double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

  // Unbiased uniform integer in [0, bound), bound >= 1.
  // Lemire multiply-shift with rejection.
  std::uint64_t next_below(std::uint64_t bound) {
    std::uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * bound;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (lo < threshold) {
        x = next_u64();
        m = static_cast<__uint128_t>(x) * bound;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Standard normal via Box-Muller; the second variate is discarded so the
  // stream stays stateless apart from the counter.
  double next_gaussian() {
    const double u1 = ((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

private:
  std::uint64_t state_;
};

}  // namespace ntc
