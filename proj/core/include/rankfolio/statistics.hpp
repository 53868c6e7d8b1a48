#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace rankfolio {

struct TestResult {
  std::string test;       // "kruskal-wallis" or "wilcoxon-signed-rank"
  double statistic = 0.0; // H or W
  double p_value = 1.0;
  std::string method;     // e.g. "chi-square approximation, df = 2"
};

/// Kruskal-Wallis H on pooled fractional ranks with the tie correction
/// divisor; p from the chi-square distribution with (groups - 1) degrees of
/// freedom. If every pooled value is equal, H = 0 and p = 1.
/// Throws InvalidGroups (fewer than 2 groups, an empty group, fewer than 3
/// values in total, or a non-finite value).
TestResult kruskal_wallis(std::span<const std::vector<double>> groups);

/// Largest number of non-zero differences for which the exact null
/// distribution is enumerated.
inline constexpr std::size_t kWilcoxonExactLimit = 12;

/// Wilcoxon signed-rank test on paired samples. Zero differences are
/// dropped; W is the rank sum of positive differences (average ranks on tied
/// magnitudes). Two-sided p is exact up to kWilcoxonExactLimit differences
/// and otherwise uses the tie-corrected normal approximation.
/// Throws LengthMismatch (unequal or empty samples).
TestResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

/// Normal-approximation p for the same statistic, regardless of size.
double wilcoxon_normal_p(std::span<const double> a, std::span<const double> b);

}  // namespace rankfolio
