#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace tspra {

// Thin wrapper over mt19937_64. Uniform draws are derived from raw engine
// output so that sampling decisions do not depend on the standard library's
// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n).
  std::size_t below(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n));
  }

  /// Draws an index with probability proportional to weights[i]. Weights must
  /// be finite and non-negative with a positive sum.
  std::size_t categorical(std::span<const double> weights);

  /// Draws from unnormalized log-weights using max-shift normalization.
  /// The scratch span is overwritten with the shifted exponentials.
  std::size_t categorical_log(std::span<const double> log_weights, std::span<double> scratch);

  double normal(double mean, double stddev);
  double gamma(double shape);
  std::size_t poisson(double mean);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace tspra
