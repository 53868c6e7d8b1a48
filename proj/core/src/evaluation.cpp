#include "rankfolio/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rankfolio/error.hpp"
#include "rankfolio/random.hpp"

namespace rankfolio {

std::vector<std::size_t> FoldAssignment::members(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] == fold) out.push_back(i);
  }
  return out;
}

FoldAssignment stratified_folds(const Scenario& scenario, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::InvalidSpec, "cross-validation needs k >= 2 folds");
  const std::size_t m = scenario.instance_count();
  if (m < k) {
    throw Error(ErrorCode::TooFewInstances, std::to_string(m) + " instances cannot fill " +
                                                std::to_string(k) + " folds");
  }
  std::vector<std::vector<std::size_t>> strata(scenario.algorithm_count());
  for (std::size_t i = 0; i < m; ++i) strata[best_algorithm(scenario.performance(), i)].push_back(i);

  Rng rng(seed);
  FoldAssignment out{k, std::vector<std::size_t>(m, 0)};
  std::size_t dealt = 0;
  for (auto& stratum : strata) {
    rng.shuffle(std::span<std::size_t>(stratum));
    for (std::size_t i : stratum) out.fold_of[i] = (dealt++ % k) + 1;
  }
  return out;
}

SpearmanResult spearman(const Ranking& predicted, const Ranking& actual) {
  const std::size_t n = predicted.size();
  if (n != actual.size()) {
    throw Error(ErrorCode::LengthMismatch, "rankings of different lengths (" + std::to_string(n) +
                                               " vs " + std::to_string(actual.size()) + ")");
  }
  if (n < 2) throw Error(ErrorCode::LengthMismatch, "Spearman needs at least 2 ranked items");

  const double mean_p = std::accumulate(predicted.ranks.begin(), predicted.ranks.end(), 0.0) / static_cast<double>(n);
  const double mean_a = std::accumulate(actual.ranks.begin(), actual.ranks.end(), 0.0) / static_cast<double>(n);
  double cov = 0.0, var_p = 0.0, var_a = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dp = predicted[i] - mean_p;
    const double da = actual[i] - mean_a;
    cov += dp * da;
    var_p += dp * dp;
    var_a += da * da;
  }
  if (var_p == 0.0 || var_a == 0.0) return {0.0, true};
  return {std::clamp(cov / std::sqrt(var_p * var_a), -1.0, 1.0), false};
}

QuartileSummary quartiles(std::span<const double> scores) {
  if (scores.empty()) throw Error(ErrorCode::EmptyInput, "no scores to summarize");
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  const auto at = [&](double p) {
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(lo);
    if (frac == 0.0 || lo + 1 >= sorted.size()) return sorted[lo];
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
  };
  return {sorted.front(), at(0.25), at(0.5), at(0.75), sorted.back()};
}

double sum_quartile_scores(std::span<const QuartileSummary> summaries) {
  if (summaries.empty()) throw Error(ErrorCode::EmptyInput, "no data set summaries to sum");
  double total = 0.0;
  for (const auto& s : summaries) total += s.quartile_sum();
  return total;
}

std::vector<InstanceScore> run_cross_validation(const Scenario& scenario, Strategy strategy,
                                                const LearnerCombo& combo,
                                                const CrossValidationOptions& options,
                                                const PredictionObserver& observer) {
  const auto folds = stratified_folds(scenario, options.folds, options.seed);
  const auto& perf = scenario.performance();

  std::vector<InstanceScore> scores;
  scores.reserve(scenario.instance_count());
  for (std::size_t fold = 1; fold <= folds.folds; ++fold) {
    std::vector<std::size_t> training;
    std::vector<std::size_t> held_out;
    for (std::size_t i = 0; i < scenario.instance_count(); ++i) {
      (folds.fold_of[i] == fold ? held_out : training).push_back(i);
    }
    const TrainingOptions training_options{derive_seed(options.seed, fold), options.inner_folds,
                                           options.stacking};
    const auto ranker = train_ranker(strategy, combo, scenario, training, training_options);

    for (std::size_t i : held_out) {
      const auto prediction = ranker.predict(scenario.instances()[i].features);
      if (observer) observer(i, prediction);
      const auto actual = true_ranking(perf, i);
      const auto rho = spearman(prediction.ranking, actual);
      scores.push_back(InstanceScore{scenario.instances()[i].id, i, fold, rho.rho, rho.degenerate,
                                     encode_ranking_label(prediction.ranking),
                                     encode_ranking_label(actual)});
    }
  }
  return scores;
}

// ---------------------------------------------------------------------------

std::string ComboKey::label() const {
  if (classifier == "-") return regressor;
  if (regressor == "-") return classifier;
  return classifier + "+" + regressor;
}

void GridResult::add(CellKey key, CellResult result) {
  if (std::find(dataset_order_.begin(), dataset_order_.end(), key.dataset) == dataset_order_.end()) {
    dataset_order_.push_back(key.dataset);
  }
  cells_.insert_or_assign(std::move(key), std::move(result));
}

void GridResult::add(CellKey key, QuartileSummary summary) {
  add(std::move(key), CellResult{summary, {}});
}

std::vector<std::string> GridResult::datasets() const { return dataset_order_; }

std::vector<Strategy> GridResult::strategies() const {
  std::vector<Strategy> out;
  for (Strategy s : kAllStrategies) {
    for (const auto& [key, cell] : cells_) {
      if (key.strategy == s) {
        out.push_back(s);
        break;
      }
    }
  }
  return out;
}

const CellResult* GridResult::find(const CellKey& key) const {
  const auto it = cells_.find(key);
  return it == cells_.end() ? nullptr : &it->second;
}

BestWorst select_best_worst(const GridResult& grid, Strategy strategy) {
  const auto datasets = grid.datasets();
  std::map<ComboKey, std::vector<QuartileSummary>> per_combo;
  for (const auto& [key, cell] : grid.cells()) {
    if (key.strategy == strategy) per_combo[key.combo].push_back(cell.summary);
  }
  if (per_combo.empty()) {
    throw Error(ErrorCode::IncompleteGrid,
                "no combo evaluated for strategy '" + std::string(strategy_name(strategy)) + "'");
  }

  struct Candidate {
    std::string label;
    ComboKey combo;
    double sum;
  };
  std::vector<Candidate> candidates;
  for (const auto& [combo, summaries] : per_combo) {
    if (summaries.size() != datasets.size()) {
      throw Error(ErrorCode::IncompleteGrid, "combo '" + combo.label() + "' of strategy '" +
                                                 std::string(strategy_name(strategy)) + "' covers " +
                                                 std::to_string(summaries.size()) + " of " +
                                                 std::to_string(datasets.size()) + " data sets");
    }
    candidates.push_back({combo.label(), combo, sum_quartile_scores(summaries)});
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) { return a.label < b.label; });

  const Candidate* best = &candidates.front();
  const Candidate* worst = &candidates.front();
  for (const auto& c : candidates) {
    if (c.sum > best->sum) best = &c;
    if (c.sum < worst->sum) worst = &c;
  }
  return {best->combo, best->sum, worst->combo, worst->sum};
}

}  // namespace rankfolio
