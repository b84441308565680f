#pragma once

#include <cstdint>
#include <cmath>

namespace slrgap {

// Splittable counter-based random stream (SplitMix64 core).
// Every trial/worker derives an independent child via split(index),
// so results are reproducible regardless of execution order.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed)
      : state_(mix(seed ^ kSeedTweak)), base_(state_) {}

  // Child stream deterministically derived from (this stream's seed, index);
  // independent of how much this stream has been consumed.
  RngStream split(std::uint64_t index) const {
    RngStream child(0);
    child.state_ = mix(base_ ^ mix(index + kSplitTweak));
    child.base_ = child.state_;
    child.have_cached_ = false;
    return child;
  }

  std::uint64_t next_u64() {
    state_ += kGamma;
    return mix(state_);
  }

  // Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in {0, ..., n-1} (n >= 1), unbiased via rejection.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  // Standard normal, Box-Muller with one cached value.
  double next_gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1, u2;
    do {
      u1 = next_double();
    } while (u1 <= 0.0);
    u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  static constexpr std::uint64_t kSeedTweak = 0x5851f42d4c957f2dULL;
  static constexpr std::uint64_t kSplitTweak = 0xd6e8feb86659fd93ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
  std::uint64_t base_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace slrgap
