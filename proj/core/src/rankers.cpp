#include "rankfolio/rankers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rankfolio/error.hpp"
#include "rankfolio/random.hpp"

namespace rankfolio {

namespace {

struct StrategyInfo {
  Strategy strategy;
  std::string_view name;
  PredictionLevel level;
  bool classifier;
  bool regressor;
};

constexpr std::array<StrategyInfo, 10> kStrategyTable{{
    {Strategy::Order, "order", PredictionLevel::R1, true, false},
    {Strategy::OrderScoreClass, "order-score-class", PredictionLevel::R1, true, false},
    {Strategy::OrderScoreReg, "order-score-reg", PredictionLevel::R1, false, true},
    {Strategy::FasterThanClass, "faster-than-class", PredictionLevel::R1, true, false},
    {Strategy::FasterThanDiffClass, "faster-than-diff-class", PredictionLevel::R1, true, true},
    {Strategy::SolveTime, "solve-time", PredictionLevel::R2, false, true},
    {Strategy::SolveTimeLog, "solve-time-log", PredictionLevel::R2, false, true},
    {Strategy::ProbBest, "prob-best", PredictionLevel::R2, false, true},
    {Strategy::FasterThanVote, "faster-than-vote", PredictionLevel::R2, true, false},
    {Strategy::FasterThanDiffSum, "faster-than-diff-sum", PredictionLevel::R2, false, true},
}};

const StrategyInfo& info(Strategy strategy) {
  return kStrategyTable[static_cast<std::size_t>(strategy)];
}

}  // namespace

std::string_view strategy_name(Strategy strategy) noexcept { return info(strategy).name; }

std::optional<Strategy> parse_strategy(std::string_view name) noexcept {
  for (const auto& entry : kStrategyTable) {
    if (entry.name == name) return entry.strategy;
  }
  return std::nullopt;
}

PredictionLevel strategy_level(Strategy strategy) noexcept { return info(strategy).level; }
bool needs_classifier(Strategy strategy) noexcept { return info(strategy).classifier; }
bool needs_regressor(Strategy strategy) noexcept { return info(strategy).regressor; }

// ---------------------------------------------------------------------------
// Pairwise targets and aggregation

std::vector<AlgorithmPair> algorithm_pairs(std::size_t n) {
  std::vector<AlgorithmPair> pairs;
  pairs.reserve(n * (n - 1) / 2);
  for (AlgorithmIndex i = 0; i < n; ++i) {
    for (AlgorithmIndex j = i + 1; j < n; ++j) pairs.push_back({i, j});
  }
  return pairs;
}

PairOutcome parse_pair_outcome(std::string_view label) {
  if (label == kFirstFaster) return PairOutcome::FirstFaster;
  if (label == kSecondFaster) return PairOutcome::SecondFaster;
  throw Error(ErrorCode::MalformedLabel, "pairwise label '" + std::string(label) +
                                             "' is neither 'first' nor 'second'");
}

namespace {

std::vector<FeatureRow> feature_rows(const Scenario& scenario, std::span<const std::size_t> instances) {
  std::vector<FeatureRow> rows;
  rows.reserve(instances.size());
  for (std::size_t i : instances) rows.push_back(scenario.instances().at(i).features);
  return rows;
}

}  // namespace

std::vector<ClassificationSet> make_pairwise_faster_targets(const Scenario& scenario,
                                                            std::span<const std::size_t> instances) {
  const auto rows = feature_rows(scenario, instances);
  const auto& perf = scenario.performance();
  std::vector<ClassificationSet> out;
  for (const auto [i, j] : algorithm_pairs(scenario.algorithm_count())) {
    ClassificationSet set{rows, {}};
    set.labels.reserve(instances.size());
    for (std::size_t inst : instances) {
      const bool second_faster = perf.runtime(inst, j) < perf.runtime(inst, i);
      set.labels.emplace_back(second_faster ? kSecondFaster : kFirstFaster);
    }
    out.push_back(std::move(set));
  }
  return out;
}

std::vector<RegressionSet> make_pairwise_difference_targets(const Scenario& scenario,
                                                            std::span<const std::size_t> instances) {
  const auto rows = feature_rows(scenario, instances);
  const auto& perf = scenario.performance();
  std::vector<RegressionSet> out;
  for (const auto [i, j] : algorithm_pairs(scenario.algorithm_count())) {
    RegressionSet set{rows, {}};
    set.targets.reserve(instances.size());
    for (std::size_t inst : instances) set.targets.push_back(perf.runtime(inst, j) - perf.runtime(inst, i));
    out.push_back(std::move(set));
  }
  return out;
}

std::vector<double> majority_vote_scores(std::span<const PairOutcome> outcomes, std::size_t n) {
  const auto pairs = algorithm_pairs(n);
  if (outcomes.size() != pairs.size()) {
    throw Error(ErrorCode::LengthMismatch, "expected " + std::to_string(pairs.size()) +
                                               " pairwise outcomes, got " + std::to_string(outcomes.size()));
  }
  std::vector<double> votes(n, 0.0);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    votes[outcomes[p] == PairOutcome::FirstFaster ? pairs[p].first : pairs[p].second] += 1.0;
  }
  return votes;
}

std::vector<double> difference_sum_scores(std::span<const double> differences, std::size_t n) {
  const auto pairs = algorithm_pairs(n);
  if (differences.size() != pairs.size()) {
    throw Error(ErrorCode::LengthMismatch, "expected " + std::to_string(pairs.size()) +
                                               " pairwise differences, got " +
                                               std::to_string(differences.size()));
  }
  std::vector<double> sums(n, 0.0);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    if (!std::isfinite(differences[p])) {
      throw Error(ErrorCode::NonFiniteScore, "pairwise difference is not finite");
    }
    sums[pairs[p].first] += differences[p];
    sums[pairs[p].second] -= differences[p];
  }
  return sums;
}

double log_runtime_target(double runtime) { return std::log(std::max(runtime, kLogRuntimeFloor)); }

// ---------------------------------------------------------------------------
// Stacking

namespace {

void require(const LearnerCombo& combo, Strategy strategy) {
  const bool missing_clf = needs_classifier(strategy) && !combo.classifier;
  const bool missing_reg = needs_regressor(strategy) && !combo.regressor;
  if (!missing_clf && !missing_reg) return;
  std::string need;
  if (needs_classifier(strategy)) need = "a classifier";
  if (needs_regressor(strategy)) need += need.empty() ? "a regressor" : " and a regressor";
  throw Error(ErrorCode::ComboMismatch,
              "strategy '" + std::string(strategy_name(strategy)) + "' requires " + need);
}

/// Layer-1 pairwise models fitted on a subset of training rows.
struct PairwiseModels {
  std::vector<std::shared_ptr<const ClassifierModel>> classifiers;
  std::vector<std::shared_ptr<const RegressorModel>> regressors;
};

PairwiseModels fit_pairwise(PairwisePlan plan, const LearnerCombo& combo, const Scenario& scenario,
                            std::span<const std::size_t> instances) {
  PairwiseModels models;
  if (plan == PairwisePlan::FasterThan) {
    for (const auto& set : make_pairwise_faster_targets(scenario, instances)) {
      models.classifiers.push_back(combo.classifier->fit(set));
    }
  } else {
    for (const auto& set : make_pairwise_difference_targets(scenario, instances)) {
      models.regressors.push_back(combo.regressor->fit(set));
    }
  }
  return models;
}

FeatureRow pairwise_outputs(const PairwiseModels& models, std::span<const double> features) {
  FeatureRow out;
  if (!models.classifiers.empty()) {
    out.reserve(models.classifiers.size());
    for (const auto& model : models.classifiers) {
      out.push_back(parse_pair_outcome(model->predict(features)) == PairOutcome::FirstFaster ? 1.0 : 0.0);
    }
  } else {
    out.reserve(models.regressors.size());
    for (const auto& model : models.regressors) out.push_back(model->predict(features));
  }
  return out;
}

std::string true_label(const Scenario& scenario, std::size_t instance) {
  return encode_ranking_label(true_ranking(scenario.performance(), instance));
}

}  // namespace

StackedTrainingSet build_stacked_training_set(PairwisePlan plan, const LearnerCombo& combo,
                                              const Scenario& scenario,
                                              std::span<const std::size_t> training,
                                              const TrainingOptions& options) {
  if (plan == PairwisePlan::FasterThan && !combo.classifier) {
    throw Error(ErrorCode::ComboMismatch, "faster-than stacking requires a classifier");
  }
  if (plan == PairwisePlan::Difference && !combo.regressor) {
    throw Error(ErrorCode::ComboMismatch, "difference stacking requires a regressor");
  }
  if (training.empty()) throw Error(ErrorCode::EmptyInput, "no training instances");

  const std::size_t m = training.size();
  StackedTrainingSet out;
  out.data.rows.resize(m);
  out.data.labels.resize(m);
  out.inner_fold.assign(m, 0);
  for (std::size_t r = 0; r < m; ++r) out.data.labels[r] = true_label(scenario, training[r]);

  if (options.stacking == StackingMode::Resubstitution) {
    const auto models = fit_pairwise(plan, combo, scenario, training);
    for (std::size_t r = 0; r < m; ++r) {
      out.data.rows[r] = pairwise_outputs(models, scenario.instances()[training[r]].features);
    }
    return out;
  }

  const std::size_t k = options.inner_folds;
  if (k < 2) throw Error(ErrorCode::InvalidSpec, "stacking needs at least 2 inner folds");
  if (m < k) {
    throw Error(ErrorCode::TooFewRows, "stacking needs at least " + std::to_string(k) +
                                           " training rows, got " + std::to_string(m));
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(options.seed);
  rng.shuffle(std::span<std::size_t>(order));
  for (std::size_t pos = 0; pos < m; ++pos) out.inner_fold[order[pos]] = pos % k;

  for (std::size_t fold = 0; fold < k; ++fold) {
    std::vector<std::size_t> fit_on;
    for (std::size_t r = 0; r < m; ++r) {
      if (out.inner_fold[r] != fold) fit_on.push_back(training[r]);
    }
    const auto models = fit_pairwise(plan, combo, scenario, fit_on);
    for (std::size_t r = 0; r < m; ++r) {
      if (out.inner_fold[r] == fold) {
        out.data.rows[r] = pairwise_outputs(models, scenario.instances()[training[r]].features);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Training

TrainedRanker train_ranker(Strategy strategy, const LearnerCombo& combo, const Scenario& scenario,
                           std::span<const std::size_t> training, const TrainingOptions& options) {
  require(combo, strategy);
  if (training.empty()) throw Error(ErrorCode::EmptyInput, "no training instances");

  const std::size_t n = scenario.algorithm_count();
  const auto& perf = scenario.performance();

  TrainedRanker ranker;
  ranker.strategy_ = strategy;
  ranker.algorithms_ = n;
  ranker.arity_ = scenario.feature_count();
  if (needs_classifier(strategy)) ranker.classifier_name_ = combo.classifier->name();
  if (needs_regressor(strategy)) ranker.regressor_name_ = combo.regressor->name();

  ranker.mean_runtime_.assign(n, 0.0);
  for (std::size_t inst : training) {
    for (AlgorithmIndex a = 0; a < n; ++a) ranker.mean_runtime_[a] += perf.runtime(inst, a);
  }
  for (double& v : ranker.mean_runtime_) v /= static_cast<double>(training.size());

  const auto rows = feature_rows(scenario, training);
  std::vector<Ranking> truth;
  truth.reserve(training.size());
  for (std::size_t inst : training) truth.push_back(true_ranking(perf, inst));

  // one regression target per algorithm, derived from each training instance
  auto fit_per_algorithm = [&](auto target_of) {
    for (AlgorithmIndex a = 0; a < n; ++a) {
      RegressionSet set{rows, {}};
      set.targets.reserve(training.size());
      for (std::size_t r = 0; r < training.size(); ++r) set.targets.push_back(target_of(r, a));
      ranker.regressors_.push_back(combo.regressor->fit(set));
    }
  };

  switch (strategy) {
    case Strategy::Order: {
      ClassificationSet set{rows, {}};
      for (const auto& r : truth) set.labels.push_back(encode_ranking_label(r));
      ranker.label_model_ = combo.classifier->fit(set);
      break;
    }
    case Strategy::OrderScoreClass:
      for (AlgorithmIndex a = 0; a < n; ++a) {
        ClassificationSet set{rows, {}};
        for (const auto& r : truth) set.labels.push_back(format_number(r[a]));
        ranker.classifiers_.push_back(combo.classifier->fit(set));
      }
      break;
    case Strategy::OrderScoreReg:
      fit_per_algorithm([&](std::size_t r, AlgorithmIndex a) { return truth[r][a]; });
      break;
    case Strategy::FasterThanClass:
    case Strategy::FasterThanDiffClass: {
      const auto plan = strategy == Strategy::FasterThanClass ? PairwisePlan::FasterThan
                                                              : PairwisePlan::Difference;
      const auto stacked = build_stacked_training_set(plan, combo, scenario, training, options);
      ranker.label_model_ = combo.classifier->fit(stacked.data);
      auto layer1 = fit_pairwise(plan, combo, scenario, training);
      ranker.classifiers_ = std::move(layer1.classifiers);
      ranker.regressors_ = std::move(layer1.regressors);
      break;
    }
    case Strategy::SolveTime:
      fit_per_algorithm([&](std::size_t r, AlgorithmIndex a) { return perf.runtime(training[r], a); });
      break;
    case Strategy::SolveTimeLog:
      fit_per_algorithm(
          [&](std::size_t r, AlgorithmIndex a) { return log_runtime_target(perf.runtime(training[r], a)); });
      break;
    case Strategy::ProbBest: {
      std::vector<AlgorithmIndex> best;
      for (std::size_t inst : training) best.push_back(best_algorithm(perf, inst));
      fit_per_algorithm([&](std::size_t r, AlgorithmIndex a) { return best[r] == a ? 1.0 : 0.0; });
      break;
    }
    case Strategy::FasterThanVote:
      ranker.classifiers_ = fit_pairwise(PairwisePlan::FasterThan, combo, scenario, training).classifiers;
      break;
    case Strategy::FasterThanDiffSum:
      ranker.regressors_ = fit_pairwise(PairwisePlan::Difference, combo, scenario, training).regressors;
      break;
  }
  return ranker;
}

// ---------------------------------------------------------------------------
// Prediction

std::vector<double> TrainedRanker::pairwise_layer_outputs(std::span<const double> features) const {
  return pairwise_outputs(PairwiseModels{classifiers_, regressors_}, features);
}

Ranking TrainedRanker::order_by_predicted_rank(std::span<const double> predicted) const {
  std::vector<AlgorithmIndex> order(algorithms_);
  std::iota(order.begin(), order.end(), AlgorithmIndex{0});
  std::sort(order.begin(), order.end(), [&](AlgorithmIndex a, AlgorithmIndex b) {
    if (predicted[a] != predicted[b]) return predicted[a] < predicted[b];
    if (mean_runtime_[a] != mean_runtime_[b]) return mean_runtime_[a] < mean_runtime_[b];
    return a < b;
  });
  Ranking ranking{std::vector<double>(algorithms_)};
  for (std::size_t pos = 0; pos < order.size(); ++pos) ranking.ranks[order[pos]] = static_cast<double>(pos + 1);
  return ranking;
}

namespace {

RankPrediction with_scores(std::vector<double> values, ScoreDirection direction) {
  RankPrediction p;
  p.level = PredictionLevel::R2;
  p.ranking = derive_ranking_from_scores(values, direction);
  p.scores = Scores{std::move(values), direction};
  return p;
}

Ranking decode_predicted_label(const std::string& label, std::size_t n) {
  Ranking r = decode_ranking_label(label);
  if (r.size() != n) {
    throw Error(ErrorCode::MalformedLabel, "predicted label '" + label + "' does not rank " +
                                               std::to_string(n) + " algorithms");
  }
  return r;
}

}  // namespace

RankPrediction TrainedRanker::predict(std::span<const double> features) const {
  if (features.size() != arity_) {
    throw Error(ErrorCode::ArityMismatch, "ranker expects " + std::to_string(arity_) +
                                              " features, got " + std::to_string(features.size()));
  }
  const std::size_t n = algorithms_;

  switch (strategy_) {
    case Strategy::Order:
      return {decode_predicted_label(label_model_->predict(features), n), PredictionLevel::R1, std::nullopt};

    case Strategy::OrderScoreClass: {
      std::vector<double> predicted(n);
      for (AlgorithmIndex a = 0; a < n; ++a) {
        const std::string label = classifiers_[a]->predict(features);
        char* end = nullptr;
        predicted[a] = std::strtod(label.c_str(), &end);
        if (end == label.c_str() || *end != '\0') {
          throw Error(ErrorCode::MalformedLabel, "rank label '" + label + "' is not numeric");
        }
      }
      return {order_by_predicted_rank(predicted), PredictionLevel::R1, std::nullopt};
    }

    case Strategy::OrderScoreReg: {
      std::vector<double> predicted(n);
      for (AlgorithmIndex a = 0; a < n; ++a) {
        predicted[a] = regressors_[a]->predict(features);
        if (!std::isfinite(predicted[a])) throw Error(ErrorCode::NonFiniteScore, "predicted rank is not finite");
      }
      return {order_by_predicted_rank(predicted), PredictionLevel::R1, std::nullopt};
    }

    case Strategy::FasterThanClass:
    case Strategy::FasterThanDiffClass: {
      const auto stacked = pairwise_layer_outputs(features);
      return {decode_predicted_label(label_model_->predict(stacked), n), PredictionLevel::R1, std::nullopt};
    }

    case Strategy::SolveTime: {
      std::vector<double> runtimes(n);
      for (AlgorithmIndex a = 0; a < n; ++a) runtimes[a] = regressors_[a]->predict(features);
      return with_scores(std::move(runtimes), ScoreDirection::LowerBetter);
    }

    case Strategy::SolveTimeLog: {
      // reported back on the runtime scale; exp is monotone so the order is
      // that of the predicted logs
      std::vector<double> runtimes(n);
      for (AlgorithmIndex a = 0; a < n; ++a) {
        runtimes[a] = std::exp(std::min(regressors_[a]->predict(features), 700.0));
      }
      return with_scores(std::move(runtimes), ScoreDirection::LowerBetter);
    }

    case Strategy::ProbBest: {
      std::vector<double> probability(n);
      for (AlgorithmIndex a = 0; a < n; ++a) {
        const double raw = regressors_[a]->predict(features);
        if (!std::isfinite(raw)) throw Error(ErrorCode::NonFiniteScore, "predicted probability is not finite");
        probability[a] = std::clamp(raw, 0.0, 1.0);
      }
      return with_scores(std::move(probability), ScoreDirection::HigherBetter);
    }

    case Strategy::FasterThanVote: {
      std::vector<PairOutcome> outcomes;
      outcomes.reserve(classifiers_.size());
      for (const auto& model : classifiers_) outcomes.push_back(parse_pair_outcome(model->predict(features)));
      return with_scores(majority_vote_scores(outcomes, n), ScoreDirection::HigherBetter);
    }

    case Strategy::FasterThanDiffSum: {
      std::vector<double> differences;
      differences.reserve(regressors_.size());
      for (const auto& model : regressors_) differences.push_back(model->predict(features));
      return with_scores(difference_sum_scores(differences, n), ScoreDirection::HigherBetter);
    }
  }
  throw Error(ErrorCode::UnknownStrategy, "unhandled strategy");
}

}  // namespace rankfolio
