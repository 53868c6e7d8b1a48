#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rankfolio {

using AlgorithmIndex = std::size_t;

/// A weak order over the portfolio stored as 1-based fractional ranks in
/// portfolio order. Rank 1 is best; tied algorithms share the mean of the
/// positions they occupy, so ranks are always multiples of 0.5 and sum to
/// n(n+1)/2.
struct Ranking {
  std::vector<double> ranks;

  std::size_t size() const noexcept { return ranks.size(); }
  double operator[](AlgorithmIndex a) const { return ranks[a]; }

  friend bool operator==(const Ranking&, const Ranking&) = default;
};

/// Fractional ranks of `values` in ascending order (smallest value gets 1).
/// Exactly equal values receive the average of their positions.
std::vector<double> fractional_ranks(std::span<const double> values);

/// n(n+1)/2.
double rank_total(std::size_t n) noexcept;

/// True iff `ranks` is a fixed point of fractional ranking, i.e. a well-formed
/// weak order of length >= 1.
bool is_valid_ranking(std::span<const double> ranks);

enum class PredictionLevel { R1, R2 };

std::string_view to_string(PredictionLevel level) noexcept;
std::optional<PredictionLevel> parse_level(std::string_view text) noexcept;

enum class ScoreDirection { HigherBetter, LowerBetter };

/// Ranking induced by per-algorithm scores. Throws NonFiniteScore.
Ranking derive_ranking_from_scores(std::span<const double> scores, ScoreDirection direction);

/// Ranks joined by '|' in portfolio order, e.g. "1.5|1.5|3".
std::string encode_ranking_label(const Ranking& ranking);

/// Inverse of encode_ranking_label. Throws MalformedLabel or
/// InvalidRankMultiset.
Ranking decode_ranking_label(std::string_view label);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);

}  // namespace rankfolio
