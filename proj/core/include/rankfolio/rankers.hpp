#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rankfolio/learners.hpp"
#include "rankfolio/ranking.hpp"
#include "rankfolio/scenario.hpp"

namespace rankfolio {

/// The ten ways of predicting a portfolio ranking. The first five produce a
/// bare ranking (R1); the last five attach per-algorithm scores (R2).
enum class Strategy {
  Order,                // ranking predicted directly as a label
  OrderScoreClass,      // each algorithm's rank predicted as a category
  OrderScoreReg,        // each algorithm's rank predicted as a real
  FasterThanClass,      // pairwise faster-than labels -> ranking label
  FasterThanDiffClass,  // pairwise runtime differences -> ranking label
  SolveTime,            // runtime regression
  SolveTimeLog,         // log-runtime regression
  ProbBest,             // regression on the "is best" indicator
  FasterThanVote,       // pairwise faster-than wins counted
  FasterThanDiffSum,    // pairwise runtime differences summed
};

inline constexpr std::array<Strategy, 10> kAllStrategies{
    Strategy::Order,         Strategy::OrderScoreClass, Strategy::OrderScoreReg,
    Strategy::FasterThanClass, Strategy::FasterThanDiffClass, Strategy::SolveTime,
    Strategy::SolveTimeLog,  Strategy::ProbBest,        Strategy::FasterThanVote,
    Strategy::FasterThanDiffSum};

/// CLI names: order, order-score-class, ..., faster-than-diff-sum.
std::string_view strategy_name(Strategy strategy) noexcept;
std::optional<Strategy> parse_strategy(std::string_view name) noexcept;
PredictionLevel strategy_level(Strategy strategy) noexcept;
bool needs_classifier(Strategy strategy) noexcept;
bool needs_regressor(Strategy strategy) noexcept;

struct Scores {
  std::vector<double> values;
  ScoreDirection direction = ScoreDirection::HigherBetter;
};

/// A predicted ranking. At R2 `scores` is present and `ranking` equals
/// derive_ranking_from_scores(scores); at R1 `scores` is empty.
struct RankPrediction {
  Ranking ranking;
  PredictionLevel level = PredictionLevel::R1;
  std::optional<Scores> scores;

  /// Drops the scores; the ranking is unchanged.
  RankPrediction downcast() const { return RankPrediction{ranking, PredictionLevel::R1, std::nullopt}; }
};

// ---------------------------------------------------------------------------
// Pairwise targets

/// Unordered algorithm pair oriented by portfolio index (first < second).
struct AlgorithmPair {
  AlgorithmIndex first;
  AlgorithmIndex second;
};

/// All n(n-1)/2 pairs in portfolio order: (0,1), (0,2), ..., (n-2,n-1).
std::vector<AlgorithmPair> algorithm_pairs(std::size_t n);

inline constexpr std::string_view kFirstFaster = "first";
inline constexpr std::string_view kSecondFaster = "second";

enum class PairOutcome { FirstFaster, SecondFaster };

/// Throws MalformedLabel for anything but "first" / "second".
PairOutcome parse_pair_outcome(std::string_view label);

/// One dataset per pair; label "first" when runtime(first) <= runtime(second).
std::vector<ClassificationSet> make_pairwise_faster_targets(const Scenario& scenario,
                                                            std::span<const std::size_t> instances);

/// One dataset per pair; target runtime(second) - runtime(first), so a
/// positive value means the first algorithm is faster.
std::vector<RegressionSet> make_pairwise_difference_targets(const Scenario& scenario,
                                                            std::span<const std::size_t> instances);

/// vote[a] = number of pairs in which `a` was predicted faster. `outcomes`
/// is indexed like algorithm_pairs(n). Throws LengthMismatch.
std::vector<double> majority_vote_scores(std::span<const PairOutcome> outcomes, std::size_t n);

/// s[a] = sum over b != a of d(a, b) with d(b, a) = -d(a, b). `differences`
/// is indexed like algorithm_pairs(n). Throws NonFiniteScore.
std::vector<double> difference_sum_scores(std::span<const double> differences, std::size_t n);

inline constexpr double kLogRuntimeFloor = 1e-3;

/// ln(max(runtime, 1e-3)).
double log_runtime_target(double runtime);

// ---------------------------------------------------------------------------
// Training

/// The learners a strategy may draw on. Unused roles may be null.
struct LearnerCombo {
  std::shared_ptr<const ClassifierLearner> classifier;
  std::shared_ptr<const RegressorLearner> regressor;
};

enum class StackingMode {
  OutOfFold,       // layer-2 inputs come from inner-fold models that never saw the row
  Resubstitution,  // layer-2 inputs come from layer-1 models fitted on every row
};

struct TrainingOptions {
  std::uint64_t seed = 0;
  std::size_t inner_folds = 5;
  StackingMode stacking = StackingMode::OutOfFold;
};

enum class PairwisePlan { FasterThan, Difference };

struct StackedTrainingSet {
  /// One row per training instance: n(n-1)/2 layer-1 outputs (faster-than
  /// as 1 for "first" and 0 for "second"; differences as reals), labelled
  /// with the instance's true ranking label.
  ClassificationSet data;
  /// Inner fold that produced each row's features (all 0 under
  /// resubstitution).
  std::vector<std::size_t> inner_fold;
};

/// Throws TooFewRows when out-of-fold stacking has fewer training rows than
/// inner folds, ComboMismatch when the plan's learner is missing.
StackedTrainingSet build_stacked_training_set(PairwisePlan plan, const LearnerCombo& combo,
                                              const Scenario& scenario,
                                              std::span<const std::size_t> training,
                                              const TrainingOptions& options);

/// A fitted strategy. Immutable; predict is pure and safe to call
/// concurrently.
class TrainedRanker {
 public:
  Strategy strategy() const noexcept { return strategy_; }
  PredictionLevel level() const noexcept { return strategy_level(strategy_); }
  std::size_t algorithm_count() const noexcept { return algorithms_; }
  std::size_t feature_arity() const noexcept { return arity_; }
  const std::string& classifier_name() const noexcept { return classifier_name_; }
  const std::string& regressor_name() const noexcept { return regressor_name_; }
  const std::vector<double>& mean_training_runtime() const noexcept { return mean_runtime_; }

  std::size_t classifier_model_count() const noexcept { return classifiers_.size(); }
  std::size_t regressor_model_count() const noexcept { return regressors_.size(); }
  bool has_label_model() const noexcept { return label_model_ != nullptr; }

  /// Throws ArityMismatch.
  RankPrediction predict(std::span<const double> features) const;

 private:
  friend TrainedRanker train_ranker(Strategy, const LearnerCombo&, const Scenario&,
                                    std::span<const std::size_t>, const TrainingOptions&);

  std::vector<double> pairwise_layer_outputs(std::span<const double> features) const;
  Ranking order_by_predicted_rank(std::span<const double> predicted) const;

  Strategy strategy_ = Strategy::Order;
  std::size_t algorithms_ = 0;
  std::size_t arity_ = 0;
  std::string classifier_name_ = "-";
  std::string regressor_name_ = "-";
  std::vector<double> mean_runtime_;
  // Order / layer-2 label classifier
  std::shared_ptr<const ClassifierModel> label_model_;
  // per-algorithm or per-pair models, in portfolio (pair) order
  std::vector<std::shared_ptr<const ClassifierModel>> classifiers_;
  std::vector<std::shared_ptr<const RegressorModel>> regressors_;
};

/// Fits `strategy` on the given training instances. Layer-1 models used at
/// prediction time are fitted on every training instance.
/// Throws ComboMismatch, EmptyInput, TooFewRows, plus learner errors.
TrainedRanker train_ranker(Strategy strategy, const LearnerCombo& combo, const Scenario& scenario,
                           std::span<const std::size_t> training, const TrainingOptions& options = {});

inline RankPrediction predict_ranking(const TrainedRanker& ranker, std::span<const double> features) {
  return ranker.predict(features);
}

}  // namespace rankfolio
