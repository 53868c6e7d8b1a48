#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rankfolio/ranking.hpp"

namespace rankfolio {

enum class RunStatus { Ok, Timeout, Memout };

std::string_view to_string(RunStatus status) noexcept;
std::optional<RunStatus> parse_status(std::string_view text) noexcept;

/// Missing feature values are stored as quiet NaN.
inline constexpr double kMissingFeature = std::numeric_limits<double>::quiet_NaN();
bool is_missing(double value) noexcept;

/// Successful runs faster than this are recorded at this value so every
/// stored runtime is strictly positive.
inline constexpr double kMinRuntime = 1e-6;

struct PerformanceRecord {
  double runtime = 0.0;
  RunStatus status = RunStatus::Ok;

  friend bool operator==(const PerformanceRecord&, const PerformanceRecord&) = default;
};

struct Instance {
  std::string id;
  std::vector<double> features;
};

/// Dense instance-major matrix of records, indexed by position in the
/// scenario's instance and algorithm lists.
class PerformanceMatrix {
 public:
  PerformanceMatrix() = default;
  PerformanceMatrix(std::size_t instances, std::size_t algorithms,
                    std::vector<PerformanceRecord> records);

  std::size_t instance_count() const noexcept { return instances_; }
  std::size_t algorithm_count() const noexcept { return algorithms_; }

  const PerformanceRecord& at(std::size_t instance, AlgorithmIndex algorithm) const;
  double runtime(std::size_t instance, AlgorithmIndex algorithm) const {
    return at(instance, algorithm).runtime;
  }
  std::vector<double> runtimes(std::size_t instance) const;

  friend bool operator==(const PerformanceMatrix&, const PerformanceMatrix&) = default;

 private:
  std::size_t instances_ = 0;
  std::size_t algorithms_ = 0;
  std::vector<PerformanceRecord> records_;
};

/// An algorithm-selection data set. Immutable once constructed; the
/// constructor enforces every invariant (unique ids, n >= 2, equal feature
/// arity, total matrix, censored records pinned to the timeout).
class Scenario {
 public:
  Scenario(std::string name, std::vector<std::string> algorithms,
           std::vector<std::string> feature_names, double timeout,
           std::vector<Instance> instances, PerformanceMatrix performance);

  const std::string& name() const noexcept { return name_; }
  const std::vector<std::string>& algorithms() const noexcept { return algorithms_; }
  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
  double timeout() const noexcept { return timeout_; }
  const std::vector<Instance>& instances() const noexcept { return instances_; }
  const PerformanceMatrix& performance() const noexcept { return performance_; }

  std::size_t algorithm_count() const noexcept { return algorithms_.size(); }
  std::size_t instance_count() const noexcept { return instances_.size(); }
  std::size_t feature_count() const noexcept { return feature_names_.size(); }

  std::optional<std::size_t> find_instance(std::string_view id) const;
  std::optional<AlgorithmIndex> find_algorithm(std::string_view id) const;

  friend bool operator==(const Scenario& a, const Scenario& b);

 private:
  std::string name_;
  std::vector<std::string> algorithms_;
  std::vector<std::string> feature_names_;
  double timeout_;
  std::vector<Instance> instances_;
  PerformanceMatrix performance_;
  std::unordered_map<std::string, std::size_t> instance_index_;
  std::unordered_map<std::string, AlgorithmIndex> algorithm_index_;
};

/// Runtime to store for a run: successful runs clamp to (0, timeout],
/// timeouts, memouts and absent values become the timeout.
/// Throws NegativeRuntime for raw < 0, InvalidSpec for timeout <= 0.
double censored_runtime(std::optional<double> raw, RunStatus status, double timeout);

/// Ascending runtimes mapped to fractional ranks.
Ranking true_ranking(const PerformanceMatrix& matrix, std::size_t instance);

/// Fastest algorithm; ties go to the smallest portfolio index.
AlgorithmIndex best_algorithm(const PerformanceMatrix& matrix, std::size_t instance);

/// Reads `meta.json`, `features.csv` and `runtimes.csv` from `root`.
Scenario load_scenario(const std::filesystem::path& root);

/// Writes the three scenario files into `root` (created if needed).
void save_scenario(const Scenario& scenario, const std::filesystem::path& root);

}  // namespace rankfolio
