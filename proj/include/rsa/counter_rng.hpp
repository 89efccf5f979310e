#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace rsa {

// Counter-based generator: value(c) = mix(key + (c + 1) * G), with
//   key    = mix(seed ^ mix(stream ^ S))
//   G      = 0x9E3779B97F4A7C15
//   S      = 0xD1B54A32D192ED03
//   mix(z) = z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//            z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31
// (all arithmetic modulo 2^64). Any (seed, stream, counter) triple can be
// evaluated independently, so parallel consumers reproduce serial output.
class CounterRng {
 public:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kStreamSalt = 0xD1B54A32D192ED03ULL;

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix(seed ^ mix(stream ^ kStreamSalt))) {}

  constexpr std::uint64_t bits(std::uint64_t counter) const {
    return mix(key_ + (counter + 1) * kGolden);
  }

  // Uniform on the open interval (0, 1): ((bits >> 11) + 0.5) * 2^-53.
  double uniform(std::uint64_t counter) const {
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller on counters 2k and 2k+1:
  //   sqrt(-2 ln u1) * cos(2 pi u2)
  double gaussian(std::uint64_t k) const {
    const double u1 = uniform(2 * k);
    const double u2 = uniform(2 * k + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t key_;
};

}  // namespace rsa
