#pragma once

#include <cstdint>
#include <initializer_list>

namespace kftrack {

/// SplitMix64 stream with portable uniform and normal draws.
///
/// Streams are derived from a root seed and a tuple of keys, so each
/// (seed, frame, object) triple owns an independent, reproducible sequence.
/// The integer stream is identical on every platform; unlike the standard
/// distributions, the float draws do not depend on the standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  /// Stream keyed by (seed, keys...).
  static Rng stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  /// Standard normal via Box-Muller.
  double normal();
  double normal(double mean, double sigma) { return mean + sigma * normal(); }
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// SplitMix64 finalizer; also used for hashing keys into seeds.
std::uint64_t mix64(std::uint64_t x);

}  // namespace kftrack
