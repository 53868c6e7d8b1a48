#include "rankfolio/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rankfolio/error.hpp"
#include "rankfolio/random.hpp"

namespace rankfolio {

namespace {

constexpr double kRegionGap = 1.0;      // log-runtime slope per region of distance
constexpr double kHardnessRange = 2.0;  // log-runtime span driven by f2
constexpr double kProxyNoise = 0.15;
constexpr double kMemoutShare = 0.25;

std::string padded_id(char prefix, std::size_t value, std::size_t count) {
  const std::string digits = std::to_string(value);
  const std::size_t width = std::to_string(count).size();
  return prefix + std::string(width - digits.size(), '0') + digits;
}

void validate(const SyntheticSpec& spec) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidSpec, what); };
  if (spec.instances < 1) fail("instances must be >= 1");
  if (spec.algorithms < 2) fail("algorithms must be >= 2 (a ranking needs n >= 2)");
  if (spec.features < 1) fail("features must be >= 1");
  if (!std::isfinite(spec.noise) || spec.noise < 0.0) fail("noise must be finite and >= 0");
  if (!(spec.censor_fraction >= 0.0 && spec.censor_fraction <= 1.0)) {
    fail("censor fraction must lie in [0, 1]");
  }
  if (!(spec.missing_fraction >= 0.0 && spec.missing_fraction < 1.0)) {
    fail("missing fraction must lie in [0, 1)");
  }
  if (!(spec.timeout > 0.0) || !std::isfinite(spec.timeout)) fail("timeout must be > 0");
}

}  // namespace

AlgorithmIndex planted_best(double signal, std::size_t algorithms) {
  const double pos = std::clamp(signal, 0.0, 1.0) * static_cast<double>(algorithms);
  return std::min(static_cast<AlgorithmIndex>(pos), algorithms - 1);
}

Scenario generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  validate(spec);
  Rng rng(seed);
  const std::size_t n = spec.algorithms;

  std::vector<std::string> algorithms;
  for (std::size_t a = 0; a < n; ++a) algorithms.push_back(padded_id('a', a + 1, n));
  std::vector<std::string> feature_names;
  for (std::size_t f = 0; f < spec.features; ++f) feature_names.push_back("f" + std::to_string(f + 1));

  std::vector<Instance> instances;
  std::vector<PerformanceRecord> records;
  instances.reserve(spec.instances);
  records.reserve(spec.instances * n);

  for (std::size_t i = 0; i < spec.instances; ++i) {
    Instance inst{padded_id('i', i + 1, spec.instances), std::vector<double>(spec.features)};
    const double signal = rng.uniform();
    inst.features[0] = signal;
    for (std::size_t f = 1; f < spec.features; ++f) {
      double value;
      if (f == 1 || f % 2 == 0) {
        value = rng.uniform();
      } else {
        value = signal + kProxyNoise * rng.normal();
      }
      if (rng.uniform() < spec.missing_fraction) value = kMissingFeature;
      inst.features[f] = value;
    }
    double hardness_input = spec.features > 1 ? inst.features[1] : 0.5;
    if (is_missing(hardness_input)) hardness_input = 0.5;
    const double hardness = std::exp(kHardnessRange * hardness_input);

    const double pos = signal * static_cast<double>(n);
    std::vector<double> runtimes(n);
    for (std::size_t a = 0; a < n; ++a) {
      const double distance = std::abs(static_cast<double>(a) + 0.5 - pos);
      runtimes[a] = hardness * std::exp(kRegionGap * distance + spec.noise * rng.normal());
    }

    std::vector<RunStatus> status(n, RunStatus::Ok);
    for (std::size_t a = 0; a < n; ++a) {
      if (runtimes[a] >= spec.timeout) status[a] = RunStatus::Timeout;
    }
    if (rng.uniform() < spec.censor_fraction) {
      const auto ranks = fractional_ranks(runtimes);
      const double cutoff = std::ceil(static_cast<double>(n) / 2.0);
      for (std::size_t a = 0; a < n; ++a) {
        if (ranks[a] > cutoff) {
          status[a] = rng.uniform() < kMemoutShare ? RunStatus::Memout : RunStatus::Timeout;
        }
      }
    }
    for (std::size_t a = 0; a < n; ++a) {
      const std::optional<double> raw =
          status[a] == RunStatus::Ok ? std::optional<double>(runtimes[a]) : std::nullopt;
      records.push_back({censored_runtime(raw, status[a], spec.timeout), status[a]});
    }
    instances.push_back(std::move(inst));
  }

  return Scenario(spec.name, std::move(algorithms), std::move(feature_names), spec.timeout,
                  std::move(instances), PerformanceMatrix(spec.instances, n, std::move(records)));
}

}  // namespace rankfolio
