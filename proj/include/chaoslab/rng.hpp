#ifndef CHAOSLAB_RNG_HPP
#define CHAOSLAB_RNG_HPP

#include <cmath>
#include <cstdint>

namespace chaoslab {

// Counter-based generator: every variate is a pure function of
// (seed, stream, index, counter), so replicate r draws the same numbers
// no matter how replicates are scheduled across threads.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  /// independent generator for a named sub-experiment
  CounterRng sub(std::uint64_t tag) const { return CounterRng(mix(mix(seed_) ^ tag)); }

  // uniform in the open interval (0,1)
  double uniform(std::uint64_t stream, std::uint64_t index, std::uint64_t k) const {
    std::uint64_t z = mix(mix(mix(mix(seed_) ^ stream) ^ index) ^ k);
    return (static_cast<double>(z >> 11) + 0.5) * 0x1.0p-53;
  }

  // standard normal, Box-Muller on a pair of counters
  double normal(std::uint64_t stream, std::uint64_t index, std::uint64_t k) const {
    const std::uint64_t base = 2 * (k / 2);
    const double u1 = uniform(stream, index, base);
    const double u2 = uniform(stream, index, base + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 6.283185307179586476925286766559 * u2;
    return (k & 1) ? r * std::sin(th) : r * std::cos(th);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
};

}  // namespace chaoslab

#endif
