#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace sparsecode {

/// Named stream ids so components draw from independent, reproducible streams.
/// Per-iteration descent batches use kBatchCodes/kBatchNoise plus the iteration
/// index; everything else is fixed.
namespace streams {
inline constexpr std::uint64_t kDict = 1;
inline constexpr std::uint64_t kCodes = 2;
inline constexpr std::uint64_t kNoise = 3;
inline constexpr std::uint64_t kPairCodes = 4;
inline constexpr std::uint64_t kPairNoise = 5;
inline constexpr std::uint64_t kMomentCodes = 6;
inline constexpr std::uint64_t kMomentNoise = 7;
inline constexpr std::uint64_t kBatchCodes = 1u << 20;
inline constexpr std::uint64_t kBatchNoise = 1u << 21;
}  // namespace streams

/// Counter-based generator (splitmix64) keyed by (seed, stream).  The output
/// sequence is a pure function of the key, so identical keys reproduce the
/// same draws byte-for-byte and distinct streams can run concurrently.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream)
      : state_(mix(seed + 0x9E3779B97F4A7C15ull * (stream + 1))) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix(state_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n); unbiased via masked rejection.
  std::uint64_t uniform_below(std::uint64_t n) {
    if (n <= 1) return 0;
    std::uint64_t mask = ~0ull >> __builtin_clzll(n - 1 | 1);
    std::uint64_t v;
    do {
      v = next_u64() & mask;
    } while (v >= n);
    return v;
  }

  /// Standard normal via Box-Muller; the spare value is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1, u2;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sparsecode
