#pragma once

#include <cstdint>
#include <random>

namespace mmot {

/// Mixes a base seed with a stream index (splitmix64 finalizer) so per-item
/// generators are decorrelated and independent of iteration order.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Deterministic random source. The double-producing transforms are spelled
/// out here instead of using std::*_distribution, whose output is
/// implementation-defined; identical seeds give identical streams.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform();

  /// Uniform in [a, b).
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Standard normal (Box-Muller).
  double normal();

  /// Uniform integer in [0, n).
  std::uint64_t integer(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mmot
