#include "rankfolio/ranking.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "rankfolio/error.hpp"

namespace rankfolio {

std::vector<double> fractional_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<double> ranks(n);
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    while (end < n && values[order[end]] == values[order[start]]) ++end;
    // positions start+1 .. end share their mean, start+1 + (m-1)/2
    const double shared = static_cast<double>(start + 1) + static_cast<double>(end - start - 1) / 2.0;
    for (std::size_t i = start; i < end; ++i) ranks[order[i]] = shared;
    start = end;
  }
  return ranks;
}

double rank_total(std::size_t n) noexcept {
  return static_cast<double>(n) * static_cast<double>(n + 1) / 2.0;
}

bool is_valid_ranking(std::span<const double> ranks) {
  if (ranks.empty()) return false;
  for (double r : ranks) {
    if (!std::isfinite(r)) return false;
  }
  const auto rerank = fractional_ranks(ranks);
  return std::equal(rerank.begin(), rerank.end(), ranks.begin());
}

std::string_view to_string(PredictionLevel level) noexcept {
  return level == PredictionLevel::R1 ? "R1" : "R2";
}

std::optional<PredictionLevel> parse_level(std::string_view text) noexcept {
  if (text == "R1") return PredictionLevel::R1;
  if (text == "R2") return PredictionLevel::R2;
  return std::nullopt;
}

Ranking derive_ranking_from_scores(std::span<const double> scores, ScoreDirection direction) {
  std::vector<double> keys(scores.begin(), scores.end());
  for (std::size_t a = 0; a < keys.size(); ++a) {
    if (!std::isfinite(keys[a])) {
      throw Error(ErrorCode::NonFiniteScore, "score for algorithm index " + std::to_string(a) +
                                                 " is not finite");
    }
    if (direction == ScoreDirection::HigherBetter) keys[a] = -keys[a];
  }
  return Ranking{fractional_ranks(keys)};
}

std::string format_number(double value) {
  if (value == 0.0) return "0";  // folds -0
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

std::string encode_ranking_label(const Ranking& ranking) {
  std::string label;
  for (std::size_t a = 0; a < ranking.size(); ++a) {
    if (a > 0) label += '|';
    label += format_number(ranking[a]);
  }
  return label;
}

Ranking decode_ranking_label(std::string_view label) {
  Ranking ranking;
  std::size_t pos = 0;
  while (true) {
    const std::size_t bar = label.find('|', pos);
    const std::string_view token =
        label.substr(pos, bar == std::string_view::npos ? std::string_view::npos : bar - pos);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size() ||
        !std::isfinite(value)) {
      throw Error(ErrorCode::MalformedLabel, "cannot parse rank '" + std::string(token) +
                                                 "' in label '" + std::string(label) + "'");
    }
    ranking.ranks.push_back(value);
    if (bar == std::string_view::npos) break;
    pos = bar + 1;
  }

  const double total = std::accumulate(ranking.ranks.begin(), ranking.ranks.end(), 0.0);
  if (total != rank_total(ranking.size()) || !is_valid_ranking(ranking.ranks)) {
    throw Error(ErrorCode::InvalidRankMultiset,
                "label '" + std::string(label) + "' is not a fractional ranking of " +
                    std::to_string(ranking.size()) + " algorithms");
  }
  return ranking;
}

}  // namespace rankfolio
