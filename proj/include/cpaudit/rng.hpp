#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace cpaudit {

/// splitmix64 stream. Self-contained: generated fleets stay byte-identical
/// across platforms and standard-library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// [0, 1)
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// inclusive bounds
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(next_u64() %
                                 static_cast<std::uint64_t>(hi - lo + 1));
  }

  /// standard normal, Box-Muller
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  std::uint64_t state_;
};

/// Stable sub-seed for a named stream (FNV-1a over the tag, mixed with the
/// base seed); lets per-queue generation run in any order.
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag);

}  // namespace cpaudit
