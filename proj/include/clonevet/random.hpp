#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace clonevet {

/// Seeded generator whose derived values are fully specified here rather than
/// by the standard library's distributions, so that samples, splits and
/// initial weights are identical on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in [0, n) by rejection; n must be positive.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % n;
  }

  /// Moves a uniform random k-subset to the front of `v` (partial
  /// Fisher-Yates) and truncates to it.
  template <typename T>
  void sample_prefix(std::vector<T>& v, std::size_t k) {
    if (k > v.size()) k = v.size();
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(below(v.size() - i));
      if (j != i) std::swap(v[i], v[j]);
    }
    v.resize(k);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    const std::size_t n = v.size();
    sample_prefix(v, n);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace clonevet
