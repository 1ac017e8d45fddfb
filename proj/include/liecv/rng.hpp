#pragma once

#include <cstdint>

namespace liecv {

/// Counter-based generator: value i of stream `seed` is a pure function of
/// (seed, i), so runs are reproducible across platforms and iteration order.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  double uniform() { return at(counter_++); }

  /// uniform in [lo, hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// value in (-1, 1), symmetric
  double symmetric() { return 2.0 * uniform() - 1.0; }

  double at(std::uint64_t counter) const {
    std::uint64_t x = mix(seed_ ^ mix(counter + 0x9e3779b97f4a7c15ull));
    return static_cast<double>(x >> 11) * 0x1.0p-53;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace liecv
