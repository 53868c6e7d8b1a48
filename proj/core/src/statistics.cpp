#include "rankfolio/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>

#include <boost/math/special_functions/gamma.hpp>

#include "rankfolio/error.hpp"
#include "rankfolio/ranking.hpp"

namespace rankfolio {

namespace {

/// Sum over tie groups of t^3 - t.
double tie_term(std::span<const double> values) {
  std::map<double, double> counts;
  for (double v : values) counts[v] += 1.0;
  double term = 0.0;
  for (const auto& [value, t] : counts) term += t * t * t - t;
  return term;
}

struct SignedRanks {
  std::vector<double> ranks;     // ranks of |d| for non-zero d
  std::vector<bool> positive;
  double w = 0.0;
  double tie_term = 0.0;
};

SignedRanks signed_ranks(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) {
    throw Error(ErrorCode::LengthMismatch, "paired samples must have equal non-zero length (" +
                                               std::to_string(a.size()) + " vs " +
                                               std::to_string(b.size()) + ")");
  }
  std::vector<double> magnitude;
  SignedRanks out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (!std::isfinite(d)) throw Error(ErrorCode::InvalidGroups, "paired values must be finite");
    if (d == 0.0) continue;
    magnitude.push_back(std::abs(d));
    out.positive.push_back(d > 0.0);
  }
  out.ranks = fractional_ranks(magnitude);
  for (std::size_t i = 0; i < out.ranks.size(); ++i) {
    if (out.positive[i]) out.w += out.ranks[i];
  }
  out.tie_term = tie_term(magnitude);
  return out;
}

double normal_p(const SignedRanks& sr) {
  const auto m = static_cast<double>(sr.ranks.size());
  const double mean = m * (m + 1.0) / 4.0;
  const double var = m * (m + 1.0) * (2.0 * m + 1.0) / 24.0 - sr.tie_term / 48.0;
  if (var <= 0.0) return 1.0;
  const double z = (sr.w - mean) / std::sqrt(var);
  return std::min(1.0, std::erfc(std::abs(z) / std::sqrt(2.0)));
}

}  // namespace

TestResult kruskal_wallis(std::span<const std::vector<double>> groups) {
  if (groups.size() < 2) throw Error(ErrorCode::InvalidGroups, "Kruskal-Wallis needs at least 2 groups");
  std::vector<double> pooled;
  for (const auto& g : groups) {
    if (g.empty()) throw Error(ErrorCode::InvalidGroups, "Kruskal-Wallis groups must be non-empty");
    for (double v : g) {
      if (!std::isfinite(v)) throw Error(ErrorCode::InvalidGroups, "Kruskal-Wallis values must be finite");
      pooled.push_back(v);
    }
  }
  const auto total = static_cast<double>(pooled.size());
  if (pooled.size() < 3) throw Error(ErrorCode::InvalidGroups, "Kruskal-Wallis needs at least 3 values");

  const double df = static_cast<double>(groups.size() - 1);
  TestResult result{"kruskal-wallis", 0.0, 1.0,
                    "chi-square approximation, df = " + format_number(df)};

  const double correction = 1.0 - tie_term(pooled) / (total * total * total - total);
  if (correction <= 0.0) {
    result.method += " (all values tied)";
    return result;
  }

  const auto ranks = fractional_ranks(pooled);
  double weighted = 0.0;
  std::size_t offset = 0;
  for (const auto& g : groups) {
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) rank_sum += ranks[offset + i];
    weighted += rank_sum * rank_sum / static_cast<double>(g.size());
    offset += g.size();
  }
  const double h = (12.0 / (total * (total + 1.0)) * weighted - 3.0 * (total + 1.0)) / correction;
  result.statistic = std::max(0.0, h);
  result.p_value = std::clamp(boost::math::gamma_q(df / 2.0, result.statistic / 2.0), 0.0, 1.0);
  return result;
}

TestResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
  const auto sr = signed_ranks(a, b);
  const std::size_t m = sr.ranks.size();
  TestResult result{"wilcoxon-signed-rank", sr.w, 1.0, ""};
  if (m == 0) {
    result.method = "all differences zero";
    return result;
  }
  if (m > kWilcoxonExactLimit) {
    result.p_value = normal_p(sr);
    result.method = "normal approximation with tie correction, m = " + std::to_string(m);
    return result;
  }

  // enumerate every sign assignment; rank sums are multiples of 0.5, so the
  // comparisons below are exact
  std::uint64_t at_most = 0;
  std::uint64_t at_least = 0;
  const std::uint64_t assignments = std::uint64_t{1} << m;
  for (std::uint64_t mask = 0; mask < assignments; ++mask) {
    double w = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (mask & (std::uint64_t{1} << i)) w += sr.ranks[i];
    }
    if (w <= sr.w) ++at_most;
    if (w >= sr.w) ++at_least;
  }
  const double tail = static_cast<double>(std::min(at_most, at_least)) / static_cast<double>(assignments);
  result.p_value = std::min(1.0, 2.0 * tail);
  result.method = "exact enumeration over 2^" + std::to_string(m) + " sign assignments";
  return result;
}

double wilcoxon_normal_p(std::span<const double> a, std::span<const double> b) {
  const auto sr = signed_ranks(a, b);
  if (sr.ranks.empty()) return 1.0;
  return normal_p(sr);
}

}  // namespace rankfolio
