#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rankfolio/evaluation.hpp"
#include "rankfolio/learners.hpp"

namespace rankfolio {

/// Roles a combo token fills for a strategy. A token is either one learner
/// name used for every role the strategy needs ("tree") or
/// "classifier+regressor" ("tree+linear"). Purely syntactic.
ComboKey combo_key(std::string_view token, Strategy strategy);

struct ResolvedCombo {
  LearnerCombo learners;
  ComboKey key;
};

/// Looks the token's names up in the registry.
/// Throws UnknownLearner when a name has no learner in the role it fills.
ResolvedCombo resolve_combo(std::string_view token, Strategy strategy, const LearnerRegistry& registry);

/// Expands "all" into every registered learner (or classifier+regressor
/// pair) the strategy can use; other tokens pass through.
std::vector<std::string> expand_combos(std::span<const std::string> tokens, Strategy strategy,
                                       const LearnerRegistry& registry);

struct GridOptions {
  CrossValidationOptions cv;
  /// Worker threads; 0 runs cells sequentially on the calling thread.
  std::size_t threads = 0;
};

struct GridCell {
  std::string dataset;
  Strategy strategy = Strategy::Order;
  std::string token;
  ComboKey combo;
  bool ok = false;
  std::string error;
  CellResult result;
};

struct GridRun {
  /// Canonical (dataset, strategy, combo token) order regardless of threads.
  std::vector<GridCell> cells;

  /// Successful cells whose combo succeeded on every data set for its
  /// strategy, ready for select_best_worst.
  GridResult complete_result() const;
};

/// Cross-validates every (scenario, strategy, combo) cell. A failing cell is
/// recorded with its error message and never aborts the grid. The observer,
/// if any, may be called concurrently when threads > 0.
/// Throws InvalidSpec when two scenarios share a name.
GridRun run_grid(std::span<const Scenario> scenarios, std::span<const Strategy> strategies,
                 std::span<const std::string> combo_tokens, const LearnerRegistry& registry,
                 const GridOptions& options, const PredictionObserver& observer = {});

}  // namespace rankfolio
