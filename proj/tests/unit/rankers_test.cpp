#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "rankfolio/error.hpp"
#include "rankfolio/rankers.hpp"
#include "support.hpp"

using namespace rankfolio;
using support::error_code_of;

namespace {

std::vector<std::size_t> all_instances(const Scenario& s) {
  std::vector<std::size_t> v(s.instance_count());
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

/// Always answers the same label.
class ConstantClassifierLearner final : public ClassifierLearner {
 public:
  explicit ConstantClassifierLearner(std::string label) : label_(std::move(label)) {}
  const std::string& name() const noexcept override { return name_; }
  std::shared_ptr<const ClassifierModel> fit(const ClassificationSet& data) const override {
    return std::make_shared<Model>(label_, data.rows.front().size());
  }

 private:
  struct Model final : ClassifierModel {
    Model(std::string label, std::size_t arity) : ClassifierModel(arity), label(std::move(label)) {}
    std::string do_predict(std::span<const double>) const override { return label; }
    std::string label;
  };
  std::string name_ = "constant";
  std::string label_;
};

/// The i-th fitted model predicts values[i % size] everywhere; remembers
/// every target vector it was fitted on.
class ScriptedRegressorLearner final : public RegressorLearner {
 public:
  explicit ScriptedRegressorLearner(std::vector<double> values) : values_(std::move(values)) {}
  const std::string& name() const noexcept override { return name_; }
  std::shared_ptr<const RegressorModel> fit(const RegressionSet& data) const override {
    const double v = values_[fits_.size() % values_.size()];
    fits_.push_back(data.targets);
    return std::make_shared<Model>(v, data.rows.front().size());
  }
  const std::vector<std::vector<double>>& fits() const { return fits_; }

 private:
  struct Model final : RegressorModel {
    Model(double v, std::size_t arity) : RegressorModel(arity), value(v) {}
    double do_predict(std::span<const double>) const override { return value; }
    double value;
  };
  std::string name_ = "scripted";
  std::vector<double> values_;
  mutable std::vector<std::vector<double>> fits_;
};

LearnerCombo registry_combo(const std::string& clf, const std::string& reg) {
  const auto r = LearnerRegistry::defaults();
  return {clf.empty() ? nullptr : r.classifier(clf), reg.empty() ? nullptr : r.regressor(reg)};
}

}  // namespace

TEST(Strategies, NamesLevelsAndRoles) {
  std::size_t r1 = 0;
  for (Strategy s : kAllStrategies) {
    EXPECT_EQ(parse_strategy(strategy_name(s)), s);
    r1 += strategy_level(s) == PredictionLevel::R1;
    EXPECT_TRUE(needs_classifier(s) || needs_regressor(s));
  }
  EXPECT_EQ(r1, 5u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(strategy_level(kAllStrategies[i]), PredictionLevel::R1);
  EXPECT_EQ(strategy_name(Strategy::FasterThanDiffSum), "faster-than-diff-sum");
  EXPECT_FALSE(parse_strategy("fastest").has_value());
  EXPECT_TRUE(needs_classifier(Strategy::FasterThanDiffClass));
  EXPECT_TRUE(needs_regressor(Strategy::FasterThanDiffClass));
  EXPECT_FALSE(needs_regressor(Strategy::Order));
  EXPECT_FALSE(needs_classifier(Strategy::SolveTime));
}

TEST(PairwiseTargets, FasterThanLabels) {
  const auto s = support::scenario_from_runtimes({{5, 9}, {9, 5}, {4, 4}});
  const auto idx = all_instances(s);
  const auto sets = make_pairwise_faster_targets(s, idx);
  ASSERT_EQ(sets.size(), 1u);
  EXPECT_EQ(sets[0].labels, (std::vector<std::string>{"first", "second", "first"}));

  const auto five = support::scenario_from_runtimes({{1, 2, 3, 4, 5}});
  EXPECT_EQ(make_pairwise_faster_targets(five, all_instances(five)).size(), 10u);
}

TEST(PairwiseTargets, DifferencesAreAntisymmetric) {
  const auto s = support::scenario_from_runtimes({{5, 9, 1}, {9, 5, 2}});
  const auto sets = make_pairwise_difference_targets(s, all_instances(s));
  const auto pairs = algorithm_pairs(3);
  ASSERT_EQ(sets.size(), 3u);
  EXPECT_EQ(sets[0].targets, (std::vector<double>{4, -4}));
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    for (std::size_t i = 0; i < 2; ++i) {
      const double d_ij = sets[p].targets[i];
      const double d_ji = s.performance().runtime(i, pairs[p].first) - s.performance().runtime(i, pairs[p].second);
      EXPECT_EQ(d_ij, -d_ji);
    }
  }
}

TEST(Votes, Counting) {
  using O = PairOutcome;
  const std::vector<O> chain{O::FirstFaster, O::FirstFaster, O::FirstFaster};  // A>B, A>C, B>C
  EXPECT_EQ(majority_vote_scores(chain, 3), (std::vector<double>{2, 1, 0}));
  const std::vector<O> cycle{O::FirstFaster, O::SecondFaster, O::FirstFaster};  // A>B, C>A, B>C
  EXPECT_EQ(majority_vote_scores(cycle, 3), (std::vector<double>{1, 1, 1}));
  const std::vector<O> two{O::SecondFaster};
  EXPECT_EQ(majority_vote_scores(two, 2), (std::vector<double>{0, 1}));
  EXPECT_EQ(error_code_of([&] { majority_vote_scores(two, 3); }), ErrorCode::LengthMismatch);
}

TEST(DifferenceSums, ArithmeticAndZeroTotal) {
  const std::vector<double> d{4, 6, 2};
  const auto s = difference_sum_scores(d, 3);
  EXPECT_EQ(s, (std::vector<double>{10, -2, -8}));
  EXPECT_EQ(derive_ranking_from_scores(s, ScoreDirection::HigherBetter), (Ranking{{1, 2, 3}}));

  const std::vector<double> zeros(3, 0.0);
  const auto z = difference_sum_scores(zeros, 3);
  EXPECT_EQ(z, (std::vector<double>{0, 0, 0}));
  EXPECT_EQ(derive_ranking_from_scores(z, ScoreDirection::HigherBetter), (Ranking{{2, 2, 2}}));

  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.index(7);
    std::vector<double> diffs(n * (n - 1) / 2);
    for (auto& x : diffs) x = rng.normal() * 100;
    const auto sums = difference_sum_scores(diffs, n);
    EXPECT_NEAR(std::accumulate(sums.begin(), sums.end(), 0.0), 0.0, 1e-9);
  }
}

TEST(LogRuntimeTarget, FloorsAtEpsilon) {
  EXPECT_EQ(log_runtime_target(0.0), std::log(1e-3));
  EXPECT_EQ(log_runtime_target(1.0), 0.0);
}

TEST(Stacking, FeatureWidthIsPairCount) {
  const auto s = support::tie_free_scenario(30, 3, 1);
  const auto set = build_stacked_training_set(PairwisePlan::FasterThan, registry_combo("tree", ""), s,
                                              all_instances(s), {});
  ASSERT_EQ(set.data.rows.size(), 30u);
  for (const auto& row : set.data.rows) EXPECT_EQ(row.size(), 3u);
  for (std::size_t r = 0; r < 30; ++r) {
    EXPECT_EQ(set.data.labels[r], encode_ranking_label(true_ranking(s.performance(), r)));
  }
}

TEST(Stacking, OutOfFoldRowsNeverSeenByTheirModel) {
  const auto s = support::tie_free_scenario(40, 4, 2);
  const auto registry = LearnerRegistry::defaults();
  support::LeakCounter counter;
  LearnerCombo combo{std::make_shared<support::InstrumentedClassifierLearner>(registry.classifier("knn5"), counter),
                     std::make_shared<support::InstrumentedRegressorLearner>(registry.regressor("tree"), counter)};
  for (PairwisePlan plan : {PairwisePlan::FasterThan, PairwisePlan::Difference}) {
    counter.reset();
    build_stacked_training_set(plan, combo, s, all_instances(s), {});
    EXPECT_EQ(counter.predictions(), 40u * 6u);
    EXPECT_EQ(counter.leaks(), 0u);

    // the resubstitution switch is exactly the leak the check is for
    counter.reset();
    build_stacked_training_set(plan, combo, s, all_instances(s), {0, 5, StackingMode::Resubstitution});
    EXPECT_EQ(counter.leaks(), counter.predictions());
  }
}

TEST(Stacking, InnerFoldsBalancedAndDeterministic) {
  const auto s = support::tie_free_scenario(23, 3, 3);
  const auto combo = registry_combo("", "knn3");
  const TrainingOptions opts{99, 5, StackingMode::OutOfFold};
  const auto a = build_stacked_training_set(PairwisePlan::Difference, combo, s, all_instances(s), opts);
  const auto b = build_stacked_training_set(PairwisePlan::Difference, combo, s, all_instances(s), opts);
  EXPECT_EQ(a.data.rows, b.data.rows);
  EXPECT_EQ(a.inner_fold, b.inner_fold);
  std::vector<int> sizes(5, 0);
  for (auto f : a.inner_fold) ++sizes[f];
  for (int size : sizes) EXPECT_TRUE(size == 4 || size == 5);
}

TEST(Stacking, Errors) {
  const auto s = support::tie_free_scenario(10, 3, 4);
  const std::vector<std::size_t> few{0, 1, 2};
  EXPECT_EQ(error_code_of([&] {
              build_stacked_training_set(PairwisePlan::FasterThan, registry_combo("tree", ""), s, few, {});
            }),
            ErrorCode::TooFewRows);
  EXPECT_EQ(error_code_of([&] {
              build_stacked_training_set(PairwisePlan::Difference, registry_combo("tree", ""), s, few, {});
            }),
            ErrorCode::ComboMismatch);
}

TEST(TrainRanker, OrderWithOneNearestNeighbourReproducesTrainingLabels) {
  const auto s = support::tie_free_scenario(50, 4, 5);
  const auto ranker = train_ranker(Strategy::Order, registry_combo("knn1", ""), s, all_instances(s));
  for (std::size_t i = 0; i < s.instance_count(); ++i) {
    const auto p = ranker.predict(s.instances()[i].features);
    EXPECT_EQ(p.level, PredictionLevel::R1);
    EXPECT_FALSE(p.scores.has_value());
    EXPECT_EQ(p.ranking, true_ranking(s.performance(), i));
  }
}

TEST(TrainRanker, ProbBestTargetsAreIndicators) {
  const auto s = support::scenario_from_runtimes({{5, 4, 1, 8, 9}, {1, 2, 3, 4, 5}});
  auto scripted = std::make_shared<ScriptedRegressorLearner>(std::vector<double>{0.0});
  train_ranker(Strategy::ProbBest, {nullptr, scripted}, s, all_instances(s));
  ASSERT_EQ(scripted->fits().size(), 5u);
  std::vector<double> first_instance;
  for (const auto& targets : scripted->fits()) first_instance.push_back(targets[0]);
  EXPECT_EQ(first_instance, (std::vector<double>{0, 0, 1, 0, 0}));
}

TEST(TrainRanker, SolveTimeLogTrainsOnLogRuntimes) {
  const auto s = support::scenario_from_runtimes({{kMinRuntime, 2.0}, {1.0, 3.0}});
  auto scripted = std::make_shared<ScriptedRegressorLearner>(std::vector<double>{0.0});
  train_ranker(Strategy::SolveTimeLog, {nullptr, scripted}, s, all_instances(s));
  EXPECT_EQ(scripted->fits()[0][0], std::log(1e-3));  // stored runtime 1e-6 floors at 1e-3
  EXPECT_EQ(scripted->fits()[1][1], std::log(3.0));
}

TEST(TrainRanker, ProbBestClampsScores) {
  const auto s = support::scenario_from_runtimes({{1, 2, 3}, {3, 2, 1}});
  auto scripted = std::make_shared<ScriptedRegressorLearner>(std::vector<double>{1.2, 0.4, -0.1});
  const auto ranker = train_ranker(Strategy::ProbBest, {nullptr, scripted}, s, all_instances(s));
  const auto p = ranker.predict(s.instances()[0].features);
  ASSERT_TRUE(p.scores.has_value());
  EXPECT_EQ(p.scores->values, (std::vector<double>{1.0, 0.4, 0.0}));
  EXPECT_EQ(p.ranking, (Ranking{{1, 2, 3}}));
}

TEST(TrainRanker, FasterThanVoteComposesVotesAndRanking) {
  const auto s = support::scenario_from_runtimes({{1, 2, 3}, {3, 2, 1}});
  const LearnerCombo combo{std::make_shared<ConstantClassifierLearner>("first"), nullptr};
  const auto ranker = train_ranker(Strategy::FasterThanVote, combo, s, all_instances(s));
  const auto p = ranker.predict(s.instances()[1].features);
  EXPECT_EQ(p.level, PredictionLevel::R2);
  EXPECT_EQ(p.scores->values, (std::vector<double>{2, 1, 0}));
  EXPECT_EQ(p.scores->direction, ScoreDirection::HigherBetter);
  EXPECT_EQ(p.ranking, (Ranking{{1, 2, 3}}));
  EXPECT_EQ(ranker.classifier_model_count(), 3u);
}

TEST(TrainRanker, SolveTimeWithOracleIsPerfect) {
  const auto s = support::tie_free_scenario(60, 5, 6);
  const auto oracle = std::make_shared<support::OracleRegressorLearner>(s);
  std::vector<std::size_t> train, test;
  for (std::size_t i = 0; i < 60; ++i) (i % 3 ? train : test).push_back(i);
  for (Strategy strategy : {Strategy::SolveTime, Strategy::SolveTimeLog}) {
    const auto ranker = train_ranker(strategy, {nullptr, oracle}, s, train);
    for (std::size_t i : test) {
      EXPECT_EQ(ranker.predict(s.instances()[i].features).ranking, true_ranking(s.performance(), i));
    }
  }
}

TEST(TrainRanker, ModelCountsMatchTheStrategy) {
  const auto s = support::tie_free_scenario(30, 4, 7);
  const auto idx = all_instances(s);
  const auto both = registry_combo("tree", "tree");
  struct Expect {
    Strategy strategy;
    std::size_t classifiers, regressors;
    bool label_model;
  };
  for (const auto& e : {Expect{Strategy::Order, 0, 0, true}, Expect{Strategy::OrderScoreClass, 4, 0, false},
                        Expect{Strategy::OrderScoreReg, 0, 4, false}, Expect{Strategy::FasterThanClass, 6, 0, true},
                        Expect{Strategy::FasterThanDiffClass, 0, 6, true}, Expect{Strategy::SolveTime, 0, 4, false},
                        Expect{Strategy::SolveTimeLog, 0, 4, false}, Expect{Strategy::ProbBest, 0, 4, false},
                        Expect{Strategy::FasterThanVote, 6, 0, false},
                        Expect{Strategy::FasterThanDiffSum, 0, 6, false}}) {
    const auto r = train_ranker(e.strategy, both, s, idx);
    EXPECT_EQ(r.classifier_model_count(), e.classifiers) << strategy_name(e.strategy);
    EXPECT_EQ(r.regressor_model_count(), e.regressors) << strategy_name(e.strategy);
    EXPECT_EQ(r.has_label_model(), e.label_model) << strategy_name(e.strategy);
  }
}

TEST(TrainRanker, PredictionsRespectLevelInvariants) {
  const auto s = support::tie_free_scenario(60, 5, 8);
  std::vector<std::size_t> train, test;
  for (std::size_t i = 0; i < 60; ++i) (i % 4 ? train : test).push_back(i);
  const auto combo = registry_combo("knn5", "tree");
  for (Strategy strategy : kAllStrategies) {
    const auto ranker = train_ranker(strategy, combo, s, train);
    for (std::size_t i : test) {
      const auto p = ranker.predict(s.instances()[i].features);
      EXPECT_EQ(p.level, strategy_level(strategy));
      EXPECT_TRUE(is_valid_ranking(p.ranking.ranks));
      if (p.level == PredictionLevel::R2) {
        ASSERT_TRUE(p.scores.has_value());
        EXPECT_EQ(p.ranking, derive_ranking_from_scores(p.scores->values, p.scores->direction));
        const auto down = p.downcast();
        EXPECT_EQ(down.ranking, p.ranking);
        EXPECT_FALSE(down.scores.has_value());
      } else {
        EXPECT_FALSE(p.scores.has_value());
      }
    }
  }
}

TEST(TrainRanker, ComboMismatchNamesTheKinds) {
  const auto s = support::tie_free_scenario(20, 3, 9);
  try {
    train_ranker(Strategy::Order, registry_combo("", "knn5"), s, all_instances(s));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ComboMismatch);
    EXPECT_NE(std::string(e.what()).find("classifier"), std::string::npos);
  }
  EXPECT_EQ(error_code_of([&] {
              train_ranker(Strategy::FasterThanDiffClass, registry_combo("tree", ""), s, all_instances(s));
            }),
            ErrorCode::ComboMismatch);
}

TEST(TrainRanker, ArityChecked) {
  const auto s = support::tie_free_scenario(20, 3, 10);
  const auto r = train_ranker(Strategy::SolveTime, registry_combo("", "knn1"), s, all_instances(s));
  EXPECT_EQ(error_code_of([&] { r.predict(std::vector<double>{1.0}); }), ErrorCode::ArityMismatch);
}
