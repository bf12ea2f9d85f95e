#include "tspra/random.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

namespace tspra {

std::size_t Rng::categorical(std::span<const double> weights) {
  assert(!weights.empty());
  double total = 0.0;
  for (double w : weights) total += w;
  double target = uniform() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    target -= weights[i];
    if (target < 0.0) return i;
  }
  // Rounding left a sliver of mass; fall back to the last positive weight.
  for (std::size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) return i;
  }
  return weights.size() - 1;
}

std::size_t Rng::categorical_log(std::span<const double> log_weights, std::span<double> scratch) {
  assert(scratch.size() >= log_weights.size());
  double max_log = -std::numeric_limits<double>::infinity();
  for (double lw : log_weights) max_log = std::max(max_log, lw);
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    scratch[i] = std::exp(log_weights[i] - max_log);
  }
  return categorical(scratch.first(log_weights.size()));
}

double Rng::normal(double mean, double stddev) {
  // Box-Muller on our own uniforms.
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return mean + stddev * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double Rng::gamma(double shape) {
  // Marsaglia-Tsang; shape < 1 handled by the standard boost.
  if (shape < 1.0) {
    double u = uniform();
    while (u <= 0.0) u = uniform();
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal(0.0, 1.0);
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

std::size_t Rng::poisson(double mean) {
  if (mean <= 0.0) return 0;
  if (mean < 30.0) {
    const double limit = std::exp(-mean);
    std::size_t k = 0;
    double p = uniform();
    while (p > limit) {
      ++k;
      p *= uniform();
    }
    return k;
  }
  const double draw = std::round(normal(mean, std::sqrt(mean)));
  return draw < 0.0 ? 0 : static_cast<std::size_t>(draw);
}

}  // namespace tspra
