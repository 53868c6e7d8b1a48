#pragma once

#include <string>
#include <vector>

#include "rankfolio/evaluation.hpp"

namespace rankfolio::cli {

enum class ReportMode { Best, Worst };

struct ReportRow {
  Strategy strategy = Strategy::Order;
  ComboKey combo;
  std::vector<double> cells;  // quartile sum per data set, unrounded
  double total = 0.0;         // sum of the unrounded cells
  std::vector<QuartileSummary> summaries;
};

/// Strategies (rows) x data sets (columns) of q1 + median + q3 for each
/// strategy's best or worst combo.
struct ReportTable {
  std::vector<std::string> datasets;
  std::vector<ReportRow> rows;
};

/// Throws IncompleteGrid / EmptyInput.
ReportTable build_report(const GridResult& grid, ReportMode mode);

/// Rounded to three decimals with trailing zeros dropped: 3, 2.4, 11.337.
std::string format_rounded(double value);

std::string render_csv(const ReportTable& table);
std::string render_markdown(const ReportTable& table, ReportMode mode);

/// `dataset,strategy,classifier,regressor,min,q1,median,q3,max` for the
/// chosen combos.
std::string render_boxplot(const ReportTable& table);

}  // namespace rankfolio::cli
