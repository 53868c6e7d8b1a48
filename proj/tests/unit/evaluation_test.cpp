#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "rankfolio/error.hpp"
#include "rankfolio/evaluation.hpp"
#include "support.hpp"

using namespace rankfolio;
using support::error_code_of;

namespace {

/// Quantile by the defining formula: position p(m-1), linear between the
/// neighbouring order statistics.
double oracle_quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const double lo = std::floor(pos);
  const double hi = std::ceil(pos);
  return v[static_cast<std::size_t>(lo)] + (pos - lo) * (v[static_cast<std::size_t>(hi)] - v[static_cast<std::size_t>(lo)]);
}

QuartileSummary with_sum(double q1, double median, double q3) { return {q1, q1, median, q3, q3}; }

}  // namespace

TEST(Spearman, ClosedFormCases) {
  EXPECT_EQ(spearman(Ranking{{1, 2, 3, 4}}, Ranking{{1, 2, 3, 4}}).rho, 1.0);
  EXPECT_EQ(spearman(Ranking{{1, 2, 3, 4}}, Ranking{{4, 3, 2, 1}}).rho, -1.0);
  EXPECT_NEAR(spearman(Ranking{{1, 2, 3, 4}}, Ranking{{1, 3, 2, 4}}).rho, 1.0 - 6.0 * 2 / (4.0 * 15), 1e-15);
  EXPECT_EQ(spearman(Ranking{{1, 2}}, Ranking{{2, 1}}).rho, -1.0);
  EXPECT_EQ(spearman(Ranking{{2, 1}}, Ranking{{2, 1}}).rho, 1.0);
}

TEST(Spearman, DegenerateFullTie) {
  const auto r = spearman(Ranking{{2, 2, 2}}, Ranking{{1, 2, 3}});
  EXPECT_EQ(r.rho, 0.0);
  EXPECT_TRUE(r.degenerate);
  EXPECT_FALSE(spearman(Ranking{{1, 2, 3}}, Ranking{{1, 2, 3}}).degenerate);
}

TEST(Spearman, MatchesPearsonOracleWithTies) {
  Rng rng(21);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 2 + rng.index(7);
    const Ranking a{support::random_weak_order(rng, n)};
    const Ranking b{support::random_weak_order(rng, n)};
    const double rho = spearman(a, b).rho;
    EXPECT_NEAR(rho, support::oracle_pearson(a.ranks, b.ranks), 1e-12);
    EXPECT_GE(rho, -1.0);
    EXPECT_LE(rho, 1.0);
  }
}

TEST(Spearman, LengthChecks) {
  EXPECT_EQ(error_code_of([] { spearman(Ranking{{1, 2}}, Ranking{{1, 2, 3}}); }), ErrorCode::LengthMismatch);
  EXPECT_EQ(error_code_of([] { spearman(Ranking{{1}}, Ranking{{1}}); }), ErrorCode::LengthMismatch);
}

TEST(Quartiles, Examples) {
  const std::vector<double> ones(7, 1.0);
  const auto all = quartiles(ones);
  EXPECT_EQ(all.min, 1.0);
  EXPECT_EQ(all.max, 1.0);
  EXPECT_EQ(all.quartile_sum(), 3.0);

  const std::vector<double> v{-1, 0, 0.5, 1};
  const auto q = quartiles(v);
  EXPECT_EQ(q.q1, -0.25);
  EXPECT_EQ(q.median, 0.25);
  EXPECT_EQ(q.q3, 0.625);

  const auto single = quartiles(std::vector<double>{0.3});
  for (double x : {single.min, single.q1, single.median, single.q3, single.max}) EXPECT_EQ(x, 0.3);

  EXPECT_EQ(error_code_of([] { quartiles(std::vector<double>{}); }), ErrorCode::EmptyInput);
}

TEST(Quartiles, MatchInterpolationOracleAndAreOrdered) {
  Rng rng(22);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> v(1 + rng.index(40));
    for (auto& x : v) x = rng.uniform() * 2 - 1;
    const auto q = quartiles(v);
    EXPECT_NEAR(q.q1, oracle_quantile(v, 0.25), 1e-15);
    EXPECT_NEAR(q.median, oracle_quantile(v, 0.5), 1e-15);
    EXPECT_NEAR(q.q3, oracle_quantile(v, 0.75), 1e-15);
    EXPECT_LE(q.min, q.q1);
    EXPECT_LE(q.q1, q.median);
    EXPECT_LE(q.median, q.q3);
    EXPECT_LE(q.q3, q.max);
  }
}

TEST(SumQuartiles, TableTotals) {
  // single-dataset sums as in the published order and faster-than rows
  const std::vector<QuartileSummary> order{with_sum(1, 1, 1), with_sum(0.7, 0.8, 0.9), with_sum(0.889, 0.95, 0.95),
                                           with_sum(1, 1.048, 1.1)};
  EXPECT_NEAR(sum_quartile_scores(order), 11.337, 1e-9);
  const std::vector<QuartileSummary> faster{with_sum(1, 1, 1), with_sum(0.7, 0.8, 0.8), with_sum(0.907, 1, 1),
                                            with_sum(1, 1.1, 1.19)};
  EXPECT_NEAR(sum_quartile_scores(faster), 11.497, 1e-9);
  EXPECT_EQ(error_code_of([] { sum_quartile_scores(std::vector<QuartileSummary>{}); }), ErrorCode::EmptyInput);
}

TEST(StratifiedFolds, EqualFoldsWhenDivisible) {
  const auto s = support::tie_free_scenario(100, 5, 1);
  const auto f = stratified_folds(s, 10, 3);
  for (std::size_t k = 1; k <= 10; ++k) EXPECT_EQ(f.members(k).size(), 10u);
}

TEST(StratifiedFolds, StratumOfTwentyFive) {
  // 25 instances with algorithm 1 best, 15 with algorithm 2 best
  std::vector<std::vector<double>> rt;
  for (int i = 0; i < 25; ++i) rt.push_back({1, 2});
  for (int i = 0; i < 15; ++i) rt.push_back({2, 1});
  const auto s = support::scenario_from_runtimes(rt);
  const auto f = stratified_folds(s, 10, 5);
  std::vector<int> per_fold(11, 0);
  for (std::size_t i = 0; i < 25; ++i) ++per_fold[f.fold_of[i]];
  for (std::size_t k = 1; k <= 10; ++k) EXPECT_TRUE(per_fold[k] == 2 || per_fold[k] == 3) << per_fold[k];
}

TEST(StratifiedFolds, DeterministicAndSeedSensitive) {
  const auto s = support::tie_free_scenario(57, 4, 2);
  EXPECT_EQ(stratified_folds(s, 10, 1).fold_of, stratified_folds(s, 10, 1).fold_of);
  EXPECT_NE(stratified_folds(s, 10, 1).fold_of, stratified_folds(s, 10, 2).fold_of);
}

TEST(StratifiedFolds, Errors) {
  const auto s = support::tie_free_scenario(5, 3, 3);
  EXPECT_EQ(error_code_of([&] { stratified_folds(s, 10, 1); }), ErrorCode::TooFewInstances);
  EXPECT_EQ(error_code_of([&] { stratified_folds(s, 1, 1); }), ErrorCode::InvalidSpec);
}

TEST(CrossValidation, PartitionAndDeterminism) {
  const auto s = support::tie_free_scenario(80, 4, 4);
  const auto r = LearnerRegistry::defaults();
  const LearnerCombo combo{r.classifier("tree"), r.regressor("knn5")};
  std::size_t observed = 0;
  const auto a = run_cross_validation(s, Strategy::FasterThanDiffClass, combo, {10, 7},
                                      [&](std::size_t, const RankPrediction&) { ++observed; });
  EXPECT_EQ(observed, 80u);
  ASSERT_EQ(a.size(), 80u);
  std::set<std::string> ids;
  for (const auto& score : a) {
    ids.insert(score.instance);
    EXPECT_TRUE(std::isfinite(score.rho));
    EXPECT_GE(score.fold, 1u);
    EXPECT_LE(score.fold, 10u);
    EXPECT_EQ(score.actual, encode_ranking_label(true_ranking(s.performance(), score.instance_index)));
  }
  EXPECT_EQ(ids.size(), 80u);
  for (std::size_t i = 1; i < a.size(); ++i) EXPECT_LE(a[i - 1].fold, a[i].fold);

  const auto b = run_cross_validation(s, Strategy::FasterThanDiffClass, combo, {10, 7});
  ASSERT_EQ(b.size(), a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].instance, b[i].instance);
    EXPECT_EQ(a[i].rho, b[i].rho);
    EXPECT_EQ(a[i].predicted, b[i].predicted);
  }
}

TEST(CrossValidation, OracleSolveTimeScoresOne) {
  const auto s = support::tie_free_scenario(100, 5, 5);
  const auto oracle = std::make_shared<support::OracleRegressorLearner>(s);
  for (const auto& score : run_cross_validation(s, Strategy::SolveTime, {nullptr, oracle}, {10, 1})) {
    EXPECT_EQ(score.rho, 1.0);
  }
}

TEST(ComboKey, Labels) {
  EXPECT_EQ((ComboKey{"tree", "-"}).label(), "tree");
  EXPECT_EQ((ComboKey{"-", "knn5"}).label(), "knn5");
  EXPECT_EQ((ComboKey{"tree", "linear"}).label(), "tree+linear");
}

TEST(SelectBestWorst, ArgmaxArgminAndTies) {
  auto cell = [](GridResult& g, const std::string& combo, const std::string& dataset, double sum) {
    g.add(CellKey{dataset, Strategy::SolveTime, ComboKey{"-", combo}}, QuartileSummary{0, sum / 3, sum / 3, sum / 3, 1});
  };
  GridResult g;
  cell(g, "A", "d1", 2);
  cell(g, "A", "d2", 3);
  cell(g, "B", "d1", 3);
  cell(g, "B", "d2", 4);
  auto bw = select_best_worst(g, Strategy::SolveTime);
  EXPECT_EQ(bw.best.regressor, "B");
  EXPECT_EQ(bw.worst.regressor, "A");
  EXPECT_NEAR(bw.best_sum, 7, 1e-12);
  EXPECT_NEAR(bw.worst_sum, 5, 1e-12);

  GridResult single;
  cell(single, "A", "d1", 2);
  bw = select_best_worst(single, Strategy::SolveTime);
  EXPECT_EQ(bw.best, bw.worst);

  GridResult tie;
  cell(tie, "B", "d1", 3);
  cell(tie, "A", "d1", 3);
  bw = select_best_worst(tie, Strategy::SolveTime);
  EXPECT_EQ(bw.best.regressor, "A");
}

TEST(SelectBestWorst, IncompleteGrid) {
  GridResult g;
  g.add(CellKey{"d1", Strategy::Order, ComboKey{"tree", "-"}}, QuartileSummary{});
  g.add(CellKey{"d2", Strategy::Order, ComboKey{"knn5", "-"}}, QuartileSummary{});
  EXPECT_EQ(error_code_of([&] { select_best_worst(g, Strategy::Order); }), ErrorCode::IncompleteGrid);
  EXPECT_EQ(error_code_of([&] { select_best_worst(g, Strategy::SolveTime); }), ErrorCode::IncompleteGrid);
}

TEST(GridResult, OrderOfDatasetsAndStrategies) {
  GridResult g;
  g.add(CellKey{"zeta", Strategy::SolveTime, {}}, QuartileSummary{});
  g.add(CellKey{"alpha", Strategy::Order, {}}, QuartileSummary{});
  g.add(CellKey{"zeta", Strategy::Order, {}}, QuartileSummary{});
  EXPECT_EQ(g.datasets(), (std::vector<std::string>{"zeta", "alpha"}));
  EXPECT_EQ(g.strategies(), (std::vector<Strategy>{Strategy::Order, Strategy::SolveTime}));
  EXPECT_NE(g.find(CellKey{"alpha", Strategy::Order, {}}), nullptr);
  EXPECT_EQ(g.find(CellKey{"alpha", Strategy::SolveTime, {}}), nullptr);
}
