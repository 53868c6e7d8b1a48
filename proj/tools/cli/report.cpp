#include "cli/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "cli/results_io.hpp"
#include "rankfolio/csv.hpp"
#include "rankfolio/error.hpp"

namespace rankfolio::cli {

ReportTable build_report(const GridResult& grid, ReportMode mode) {
  ReportTable table;
  table.datasets = grid.datasets();
  if (table.datasets.empty()) throw Error(ErrorCode::EmptyInput, "no results to report");
  for (Strategy strategy : grid.strategies()) {
    const auto choice = select_best_worst(grid, strategy);
    ReportRow row;
    row.strategy = strategy;
    row.combo = mode == ReportMode::Best ? choice.best : choice.worst;
    for (const auto& dataset : table.datasets) {
      const auto* cell = grid.find(CellKey{dataset, strategy, row.combo});
      row.summaries.push_back(cell->summary);
      row.cells.push_back(cell->summary.quartile_sum());
      row.total += row.cells.back();
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string format_rounded(double value) {
  const double rounded = std::round(value * 1000.0) / 1000.0;
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.3f", rounded);
  std::string text(buffer);
  while (text.back() == '0') text.pop_back();
  if (text.back() == '.') text.pop_back();
  if (text == "-0") text = "0";
  return text;
}

std::string render_csv(const ReportTable& table) {
  std::ostringstream out;
  std::vector<std::string> header{"strategy"};
  header.insert(header.end(), table.datasets.begin(), table.datasets.end());
  header.push_back("total");
  csv::write_row(out, header);
  for (const auto& row : table.rows) {
    std::vector<std::string> fields{std::string(strategy_name(row.strategy))};
    for (double cell : row.cells) fields.push_back(format_rounded(cell));
    fields.push_back(format_rounded(row.total));
    csv::write_row(out, fields);
  }
  return out.str();
}

std::string render_markdown(const ReportTable& table, ReportMode mode) {
  std::ostringstream out;
  out << "| strategy |";
  for (const auto& d : table.datasets) out << ' ' << d << " |";
  out << " total |\n|---|";
  for (std::size_t i = 0; i < table.datasets.size(); ++i) out << "---:|";
  out << "---:|\n";
  for (const auto& row : table.rows) {
    out << "| " << strategy_name(row.strategy) << " |";
    for (double cell : row.cells) out << ' ' << format_rounded(cell) << " |";
    out << ' ' << format_rounded(row.total) << " |\n";
  }
  out << "\n" << (mode == ReportMode::Best ? "Best" : "Worst") << " learner combo per strategy:\n\n";
  for (const auto& row : table.rows) {
    out << "- " << strategy_name(row.strategy) << ": " << row.combo.label() << '\n';
  }
  return out.str();
}

std::string render_boxplot(const ReportTable& table) {
  std::ostringstream out;
  write_summary_header(out);
  for (std::size_t d = 0; d < table.datasets.size(); ++d) {
    for (const auto& row : table.rows) {
      write_summary_row(out, CellKey{table.datasets[d], row.strategy, row.combo}, row.summaries[d]);
    }
  }
  return out.str();
}

}  // namespace rankfolio::cli
