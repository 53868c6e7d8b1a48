#include "rankfolio/portfolio_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rankfolio/error.hpp"

namespace rankfolio {

double Schedule::total() const noexcept {
  double sum = 0.0;
  for (const auto& s : slices) sum += s.seconds;
  return sum;
}

namespace {

void check_budget(double budget) {
  if (!(budget > 0.0) || !std::isfinite(budget)) {
    throw Error(ErrorCode::InvalidBudget, "budget must be a positive number of seconds");
  }
}

/// Algorithms by rank, ties by portfolio index.
std::vector<AlgorithmIndex> rank_order(const Ranking& ranking) {
  std::vector<AlgorithmIndex> order(ranking.size());
  std::iota(order.begin(), order.end(), AlgorithmIndex{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](AlgorithmIndex a, AlgorithmIndex b) { return ranking[a] < ranking[b]; });
  return order;
}

/// Splits the budget by weight in whole milliseconds; the first slice takes
/// whatever the rounding left over.
Schedule split_budget(std::span<const AlgorithmIndex> algorithms, std::span<const double> weights,
                      double budget) {
  const double total_weight = std::accumulate(weights.begin(), weights.end(), 0.0);
  const double budget_ms = budget * 1000.0;
  Schedule schedule;
  double rest = 0.0;
  for (std::size_t i = 0; i < algorithms.size(); ++i) {
    const double ms = std::floor(budget_ms * weights[i] / total_weight + 1e-9);
    const double seconds = ms / 1000.0;
    schedule.slices.push_back({algorithms[i], seconds});
    if (i > 0) rest += seconds;
  }
  if (!schedule.slices.empty()) schedule.slices.front().seconds = budget - rest;
  return schedule;
}

}  // namespace

Schedule schedule_equal_slices(const Ranking& ranking, double budget, std::size_t top_n) {
  check_budget(budget);
  if (top_n < 1 || top_n > ranking.size()) {
    throw Error(ErrorCode::InvalidBudget, "top_n must lie in 1.." + std::to_string(ranking.size()));
  }
  auto order = rank_order(ranking);
  order.resize(top_n);
  const std::vector<double> weights(top_n, 1.0);
  return split_budget(order, weights, budget);
}

Schedule schedule_proportional(const RankPrediction& prediction, double budget) {
  if (!prediction.scores || prediction.level != PredictionLevel::R2) {
    throw Error(ErrorCode::LevelMismatch, "proportional schedules need an R2 prediction with scores");
  }
  check_budget(budget);
  const auto& scores = *prediction.scores;
  if (scores.values.size() != prediction.ranking.size()) {
    throw Error(ErrorCode::LengthMismatch, "one score per ranked algorithm required");
  }

  std::vector<double> goodness(scores.values.size());
  if (scores.direction == ScoreDirection::HigherBetter) {
    // shift only when needed to make every goodness non-negative
    const double floor = std::min(0.0, *std::min_element(scores.values.begin(), scores.values.end()));
    for (std::size_t a = 0; a < goodness.size(); ++a) goodness[a] = scores.values[a] - floor;
  } else {
    for (std::size_t a = 0; a < goodness.size(); ++a) {
      goodness[a] = 1.0 / std::max(scores.values[a], kMinScheduledRuntime);
    }
  }
  for (double g : goodness) {
    if (!std::isfinite(g)) throw Error(ErrorCode::NonFiniteScore, "scores must be finite");
  }

  const auto order = rank_order(prediction.ranking);
  const bool uniform = std::all_of(goodness.begin(), goodness.end(),
                                   [&](double g) { return g == goodness.front(); });
  std::vector<AlgorithmIndex> chosen;
  std::vector<double> weights;
  for (AlgorithmIndex a : order) {
    if (uniform) {
      chosen.push_back(a);
      weights.push_back(1.0);
    } else if (goodness[a] > 0.0) {
      chosen.push_back(a);
      weights.push_back(goodness[a]);
    }
  }
  return split_budget(chosen, weights, budget);
}

SimulationOutcome simulate(const Schedule& schedule, std::span<const double> runtimes, double timeout) {
  SimulationOutcome outcome;
  for (const auto& slice : schedule.slices) {
    if (slice.algorithm >= runtimes.size()) {
      throw Error(ErrorCode::UnknownAlgorithm, "schedule names algorithm index " +
                                                   std::to_string(slice.algorithm) + " but only " +
                                                   std::to_string(runtimes.size()) + " runtimes are known");
    }
    const double runtime = runtimes[slice.algorithm];
    if (runtime < timeout && runtime <= slice.seconds) {
      outcome.solved = true;
      outcome.solver = slice.algorithm;
      outcome.elapsed += runtime;
      return outcome;
    }
    outcome.elapsed += slice.seconds;
  }
  return outcome;
}

}  // namespace rankfolio
