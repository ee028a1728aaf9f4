#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace cholband {

/// Counter-based generator: the SplitMix64 finalizer applied to
/// (stream-derived key) + counter * golden-ratio increment. Stateless apart
/// from the counter, so streams are reproducible and independent of thread
/// scheduling. Normal variates via Box-Muller.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(derive_key(seed, stream)) {}

  std::uint64_t next_u64() {
    counter_ += 0x9E3779B97F4A7C15ULL;
    return finalize(key_ + counter_);
  }

  /// Uniform on [0, 1).
  double next_unit() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  /// Uniform on {0, ..., n-1}.
  std::uint64_t uniform_int(std::uint64_t n) {
    return std::uint64_t((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] so the log is finite
    const double u1 = double((next_u64() >> 11) + 1) * 0x1.0p-53;
    const double u2 = next_unit();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    spare_ = rad * std::sin(ang);
    has_spare_ = true;
    return rad * std::cos(ang);
  }

 private:
  static std::uint64_t finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream) {
    return finalize(seed + 0x9E3779B97F4A7C15ULL * (stream + 1));
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Fixed stream ids so generators draw from disjoint substreams.
namespace streams {
inline constexpr std::uint64_t kDiagonal = 0;     // D in the truth generator
inline constexpr std::uint64_t kStructure = 1;    // bandwidth coin flips / draws
inline constexpr std::uint64_t kValues = 2;       // T entry magnitudes and signs
inline constexpr std::uint64_t kNoise = 3;        // Gaussian sampling
inline constexpr std::uint64_t kFolds = 4;        // cross-validation shuffle
}  // namespace streams

}  // namespace cholband
