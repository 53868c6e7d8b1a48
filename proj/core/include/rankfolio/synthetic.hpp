#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "rankfolio/scenario.hpp"

namespace rankfolio {

/// Parameters of a generated scenario.
///
/// Planted rule: feature `f1` is uniform on [0, 1) and the portfolio is laid
/// out along it, so algorithm `a` is fastest when `f1 * n` falls in [a, a+1).
/// Runtimes grow exponentially with the distance from that region, which
/// makes the whole ranking (not just the winner) a function of `f1`. Feature
/// `f2` scales instance hardness without changing the ranking; the remaining
/// features alternate between noisy copies of `f1` and pure noise.
/// Runtime noise is multiplicative log-normal with scale `noise`.
struct SyntheticSpec {
  std::size_t instances = 200;
  std::size_t algorithms = 5;
  std::size_t features = 10;
  double noise = 0.1;
  /// Fraction of instances whose slower half of the portfolio is cut off
  /// (timeout or memout) and recorded at the timeout.
  double censor_fraction = 0.1;
  /// Probability that any non-signal feature value is missing.
  double missing_fraction = 0.0;
  double timeout = 3600.0;
  std::string name = "synthetic";
};

/// Deterministic for a fixed (spec, seed). Throws InvalidSpec.
Scenario generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

/// The algorithm the planted rule designates as best for a value of `f1`.
AlgorithmIndex planted_best(double signal, std::size_t algorithms);

}  // namespace rankfolio
