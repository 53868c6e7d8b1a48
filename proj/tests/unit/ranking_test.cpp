#include <gtest/gtest.h>

#include <cmath>

#include "rankfolio/error.hpp"
#include "rankfolio/ranking.hpp"
#include "support.hpp"

using namespace rankfolio;

using support::error_code_of;

TEST(FractionalRanks, DistinctValues) {
  const std::vector<double> v{10, 20, 5};
  EXPECT_EQ(fractional_ranks(v), (std::vector<double>{2, 3, 1}));
}

TEST(FractionalRanks, TiesShareTheMeanPosition) {
  const std::vector<double> a{7, 7, 9};
  EXPECT_EQ(fractional_ranks(a), (std::vector<double>{1.5, 1.5, 3}));
  const std::vector<double> all{3600, 3600, 3600};
  EXPECT_EQ(fractional_ranks(all), (std::vector<double>{2, 2, 2}));
  const std::vector<double> mixed{1, 4, 4, 4, 0};
  EXPECT_EQ(fractional_ranks(mixed), (std::vector<double>{2, 4, 4, 4, 1}));
}

TEST(FractionalRanks, MatchesCountingOracleOnRandomInput) {
  Rng rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.index(12);
    std::vector<double> v(n);
    for (auto& x : v) x = static_cast<double>(rng.index(5));
    const auto ranks = fractional_ranks(v);
    EXPECT_EQ(ranks, support::oracle_ranks(v));
    double sum = 0;
    for (double r : ranks) sum += r;
    EXPECT_EQ(sum, rank_total(n));
  }
}

TEST(IsValidRanking, AcceptsWeakOrdersOnly) {
  EXPECT_TRUE(is_valid_ranking(std::vector<double>{1.5, 1.5, 3}));
  EXPECT_TRUE(is_valid_ranking(std::vector<double>{2, 2, 2}));
  EXPECT_FALSE(is_valid_ranking(std::vector<double>{1, 1, 4}));   // sum ok, shape not
  EXPECT_FALSE(is_valid_ranking(std::vector<double>{1, 1, 3}));
  EXPECT_FALSE(is_valid_ranking(std::vector<double>{}));
}

TEST(RankingLabel, Encode) {
  EXPECT_EQ(encode_ranking_label(Ranking{{2, 1, 3}}), "2|1|3");
  EXPECT_EQ(encode_ranking_label(Ranking{{1.5, 1.5, 3}}), "1.5|1.5|3");
  EXPECT_EQ(encode_ranking_label(Ranking{{1, 2}}), "1|2");
}

TEST(RankingLabel, Decode) {
  EXPECT_EQ(decode_ranking_label("2|1|3"), (Ranking{{2, 1, 3}}));
  EXPECT_EQ(error_code_of([] { decode_ranking_label("1|1|3"); }), ErrorCode::InvalidRankMultiset);
  EXPECT_EQ(error_code_of([] { decode_ranking_label("1|1|4"); }), ErrorCode::InvalidRankMultiset);
  EXPECT_EQ(error_code_of([] { decode_ranking_label("1||2"); }), ErrorCode::MalformedLabel);
  EXPECT_EQ(error_code_of([] { decode_ranking_label("a|b"); }), ErrorCode::MalformedLabel);
  EXPECT_EQ(error_code_of([] { decode_ranking_label(""); }), ErrorCode::MalformedLabel);
}

TEST(RankingLabel, RoundTripsRandomWeakOrders) {
  Rng rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const Ranking r{support::random_weak_order(rng, 1 + rng.index(8))};
    EXPECT_EQ(decode_ranking_label(encode_ranking_label(r)), r);
  }
}

TEST(DeriveRanking, Directions) {
  const std::vector<double> runtimes{10, 20, 5};
  EXPECT_EQ(derive_ranking_from_scores(runtimes, ScoreDirection::LowerBetter), (Ranking{{2, 3, 1}}));
  const std::vector<double> votes{2, 1, 0};
  EXPECT_EQ(derive_ranking_from_scores(votes, ScoreDirection::HigherBetter), (Ranking{{1, 2, 3}}));
}

TEST(DeriveRanking, InvariantUnderMonotoneTransform) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> s(2 + rng.index(7));
    for (auto& x : s) x = 0.01 + 100 * rng.uniform();
    std::vector<double> logs;
    for (double x : s) logs.push_back(std::log(x));
    EXPECT_EQ(derive_ranking_from_scores(s, ScoreDirection::LowerBetter),
              derive_ranking_from_scores(logs, ScoreDirection::LowerBetter));
  }
}

TEST(DeriveRanking, RejectsNonFinite) {
  const std::vector<double> bad{1.0, std::nan("")};
  EXPECT_EQ(error_code_of([&] { derive_ranking_from_scores(bad, ScoreDirection::LowerBetter); }),
            ErrorCode::NonFiniteScore);
}

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(format_number(3.0), "3");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1.5), "1.5");
  const double x = 2.0 / 3.0;
  EXPECT_EQ(std::stod(format_number(x)), x);
}

TEST(PredictionLevel, Parse) {
  EXPECT_EQ(parse_level("R1"), PredictionLevel::R1);
  EXPECT_EQ(parse_level("R2"), PredictionLevel::R2);
  EXPECT_FALSE(parse_level("R3").has_value());
}
