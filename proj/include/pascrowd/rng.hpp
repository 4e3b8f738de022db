#pragma once

#include <cstdint>
#include <random>

namespace pascrowd {

/// splitmix64 finalizer; used to derive independent sub-stream seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Platform-stable uniform stream. std::mt19937_64 output is fixed by the
/// standard; the distributions in <random> are not, so the real-valued
/// mapping is done here.
class Stream {
 public:
  Stream(std::uint64_t root_seed, std::uint64_t index)
      : engine_(mix_seed(root_seed ^ mix_seed(index))) {}

  /// Uniform in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) {
    const double u = lo + (hi - lo) * unit();
    return u < hi ? u : lo;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pascrowd
