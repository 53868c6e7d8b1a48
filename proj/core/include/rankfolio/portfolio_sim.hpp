#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "rankfolio/rankers.hpp"
#include "rankfolio/ranking.hpp"

namespace rankfolio {

struct Slice {
  AlgorithmIndex algorithm = 0;
  double seconds = 0.0;

  friend bool operator==(const Slice&, const Slice&) = default;
};

/// Ordered time slices for distinct algorithms; the total never exceeds the
/// budget the schedule was built for.
struct Schedule {
  std::vector<Slice> slices;

  double total() const noexcept;
};

/// The `top_n` best-ranked algorithms (rank ties by portfolio index), each
/// given budget / top_n rounded down to whole milliseconds; the rounding
/// remainder goes to the first slice.
/// Throws InvalidBudget (budget <= 0 or top_n outside 1..n).
Schedule schedule_equal_slices(const Ranking& ranking, double budget, std::size_t top_n);

/// Floor used when turning a predicted runtime into a goodness 1 / runtime.
inline constexpr double kMinScheduledRuntime = 1e-3;

/// Budget shared in proportion to a goodness derived from the R2 scores:
/// higher-better scores shifted by their minimum, lower-better (runtime)
/// scores as 1 / max(score, 1e-3). Slices follow rank order, algorithms with
/// zero goodness are left out, and equal goodness everywhere means equal
/// slices. Slices are rounded down to milliseconds with the remainder added
/// to the first.
/// Throws LevelMismatch (no scores), InvalidBudget.
Schedule schedule_proportional(const RankPrediction& prediction, double budget);

struct SimulationOutcome {
  bool solved = false;
  std::optional<AlgorithmIndex> solver;
  double elapsed = 0.0;
};

/// Runs the slices in order. An algorithm solves the instance when its true
/// runtime is below the timeout and fits in its slice; the first to do so
/// stops the run.
/// Throws UnknownAlgorithm for a slice naming an algorithm without a runtime.
SimulationOutcome simulate(const Schedule& schedule, std::span<const double> runtimes, double timeout);

}  // namespace rankfolio
