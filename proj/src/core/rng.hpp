#ifndef ANISO_CORE_RNG_HPP
#define ANISO_CORE_RNG_HPP

#include <cstdint>

namespace aniso::rng {

/// SplitMix64 finalizer.
inline std::uint64_t mix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Standard normal CDF.
double normal_cdf(double x);

/// Inverse standard normal CDF on (0, 1).
double normal_quantile(double p);

/// Counter-based generator: draw k of a (seed, stream) pair is a pure function
/// of its arguments, so any partition of the index range across workers yields
/// the same values.
class Counter {
public:
  Counter(std::uint64_t seed, std::uint64_t stream)
      : base_(mix(seed ^ (0xA3EC647659359ACDull * (stream + 1)))) {}

  /// Uniform draw in (0, 1).
  double uniform(std::uint64_t k) const {
    const std::uint64_t bits = mix(base_ + k * 0x9E3779B97F4A7C15ull);
    return static_cast<double>(bits >> 11) * 0x1.0p-53 + 0x1.0p-54;
  }

  double uniform(std::uint64_t k, double a, double b) const {
    return a + uniform(k) * (b - a);
  }

  /// Standard normal draw (one uniform per index, inverse-CDF).
  double normal(std::uint64_t k) const { return normal_quantile(uniform(k)); }

  /// Normal(0, sd^2) conditioned on [lo, hi], again one uniform per index.
  double truncated_normal(std::uint64_t k, double sd, double lo, double hi) const;

private:
  std::uint64_t base_;
};

}  // namespace aniso::rng

#endif
