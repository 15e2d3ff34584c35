#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace scn {

/// Deterministic RNG. Every consumer derives a named sub-stream from the one
/// run seed so results do not depend on call order between components.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  static Rng stream(uint64_t seed, std::string_view name, uint64_t index = 0) {
    uint64_t h = 1469598103934665603ull;
    for (char c : name) {
      h ^= static_cast<uint8_t>(c);
      h *= 1099511628211ull;
    }
    return Rng(splitmix(splitmix(seed ^ h) + index));
  }

  uint64_t next_u64() { return eng_(); }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform() { return (eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  uint64_t below(uint64_t n) {
    // rejection keeps the draw unbiased
    uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t v;
    do {
      v = eng_();
    } while (v >= limit);
    return v % n;
  }

  double normal(double mean = 0.0, double stddev = 1.0) {
    if (have_spare_) {
      have_spare_ = false;
      return mean + stddev * spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return mean + stddev * u * f;
  }

  /// Exponential with the given scale (mean).
  double exponential(double scale) {
    double u;
    do {
      u = uniform();
    } while (u <= 0.0);
    return -scale * std::log(u);
  }

 private:
  static uint64_t splitmix(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace scn
