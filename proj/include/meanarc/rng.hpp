#pragma once
// Counter-based random streams. Stream k of seed s is an independent
// SplitMix64 sequence keyed by (s, k); no state is shared between streams,
// so results never depend on which thread evaluates which stream.

#include <cstdint>

namespace meanarc {

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix64(mix64(seed + 0x632be59bd9b4e019ULL) ^ mix64(stream * 0x9e3779b97f4a7c15ULL + 1))) {}

  std::uint64_t next() { return mix64(key_ + ++counter_ * 0x9e3779b97f4a7c15ULL); }

  /// Uniform on [0, 1) with 53 random bits; platform independent.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Derive a child seed, e.g. one per sweep point.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed ^ mix64(index + 0x2545f4914f6cdd1dULL));
}

}  // namespace meanarc
