#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rankfolio/rankers.hpp"
#include "rankfolio/scenario.hpp"

namespace rankfolio {

/// fold_of[i] in 1..folds for every instance i.
struct FoldAssignment {
  std::size_t folds = 0;
  std::vector<std::size_t> fold_of;

  std::vector<std::size_t> members(std::size_t fold) const;
};

/// Instances grouped by best algorithm, each group shuffled by `seed` and
/// dealt round-robin. The deal continues across groups, so fold sizes differ
/// by at most one and every group is spread within one of proportional.
/// Throws TooFewInstances (fewer instances than folds), InvalidSpec (k < 2).
FoldAssignment stratified_folds(const Scenario& scenario, std::size_t k, std::uint64_t seed);

struct SpearmanResult {
  double rho = 0.0;
  /// Set when either ranking is a full tie; rho is then 0.
  bool degenerate = false;
};

/// Pearson correlation of two fractional-rank vectors (the tie-corrected
/// Spearman coefficient). Throws LengthMismatch, also for length < 2.
SpearmanResult spearman(const Ranking& predicted, const Ranking& actual);

struct QuartileSummary {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;

  /// q1 + median + q3.
  double quartile_sum() const noexcept { return q1 + median + q3; }
};

/// Quantiles by linear interpolation at position p * (m - 1) of the sorted
/// sample. Throws EmptyInput.
QuartileSummary quartiles(std::span<const double> scores);

/// Sum over data sets of q1 + median + q3. Throws EmptyInput.
double sum_quartile_scores(std::span<const QuartileSummary> summaries);

struct InstanceScore {
  std::string instance;
  std::size_t instance_index = 0;
  std::size_t fold = 0;
  double rho = 0.0;
  bool degenerate = false;
  std::string predicted;
  std::string actual;
};

struct CrossValidationOptions {
  std::size_t folds = 10;
  std::uint64_t seed = 0;
  std::size_t inner_folds = 5;
  StackingMode stacking = StackingMode::OutOfFold;
};

/// Called once per held-out instance with its prediction.
using PredictionObserver = std::function<void(std::size_t instance, const RankPrediction&)>;

/// Trains on k-1 folds and scores each held-out instance against its true
/// ranking. Output is ordered by fold, then instance position.
std::vector<InstanceScore> run_cross_validation(const Scenario& scenario, Strategy strategy,
                                                const LearnerCombo& combo,
                                                const CrossValidationOptions& options,
                                                const PredictionObserver& observer = {});

// ---------------------------------------------------------------------------
// Grid results and learner selection

/// The learners a grid cell used; "-" marks an unused role.
struct ComboKey {
  std::string classifier = "-";
  std::string regressor = "-";

  /// "tree", "knn5", or "tree+linear" when both roles are used.
  std::string label() const;

  friend auto operator<=>(const ComboKey&, const ComboKey&) = default;
};

struct CellKey {
  std::string dataset;
  Strategy strategy = Strategy::Order;
  ComboKey combo;

  friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

struct CellResult {
  QuartileSummary summary;
  std::vector<InstanceScore> scores;
};

class GridResult {
 public:
  void add(CellKey key, CellResult result);
  /// Summary-only cell (e.g. read back from a summary file).
  void add(CellKey key, QuartileSummary summary);

  const std::map<CellKey, CellResult>& cells() const noexcept { return cells_; }
  std::vector<std::string> datasets() const;  // first-insertion order
  std::vector<Strategy> strategies() const;   // canonical order
  const CellResult* find(const CellKey& key) const;

 private:
  std::map<CellKey, CellResult> cells_;
  std::vector<std::string> dataset_order_;
};

struct BestWorst {
  ComboKey best;
  double best_sum = 0.0;
  ComboKey worst;
  double worst_sum = 0.0;
};

/// Ranks the strategy's combos by their quartile sums over every data set in
/// the grid. Ties go to the lexicographically smaller combo label.
/// Throws IncompleteGrid when a combo lacks a data set or none exists.
BestWorst select_best_worst(const GridResult& grid, Strategy strategy);

}  // namespace rankfolio
