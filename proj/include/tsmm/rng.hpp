#pragma once

#include <cstdint>
#include <initializer_list>

namespace tsmm {

// Counter-based deterministic generator (SplitMix64 finalizer over an
// incrementing counter). Independent streams are derived by hashing a path of
// integers into the key, so instance generation and each scenario draw use
// disjoint streams under one master seed.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t derive_key(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t k = mix(master);
    for (std::uint64_t p : path) k = mix(k ^ mix(p + 0x632BE59BD9B4E019ULL));
    return k;
  }

  std::uint64_t next_u64() { return mix(key_ + 0x9E3779B97F4A7C15ULL * (++counter_)); }

  // uniform in [0, 1)
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace tsmm
