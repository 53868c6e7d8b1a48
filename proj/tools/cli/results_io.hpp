#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rankfolio/evaluation.hpp"
#include "rankfolio/grid.hpp"
#include "rankfolio/rankers.hpp"

namespace rankfolio::cli {

inline constexpr const char* kResultsFile = "results.csv";
inline constexpr const char* kSummaryFile = "summary.csv";
inline constexpr const char* kPredictionsFile = "predictions.csv";
inline constexpr const char* kIndexFile = "index.csv";
inline constexpr const char* kSelectionFile = "selection.csv";
inline constexpr const char* kBoxplotFile = "boxplot.csv";

void write_results_header(std::ostream& out);
void write_results_rows(std::ostream& out, const CellKey& key, std::span<const InstanceScore> scores);

void write_summary_header(std::ostream& out);
void write_summary_row(std::ostream& out, const CellKey& key, const QuartileSummary& summary);

/// One row of the predictions interchange file.
struct PredictionRow {
  std::string instance;
  RankPrediction prediction;
};

void write_predictions(std::ostream& out, std::span<const PredictionRow> rows);

/// Reads `instance,level,ranking_label,scores`. Score direction is not part
/// of the format; it is recovered as the direction under which the scores
/// reproduce the ranking. Throws MalformedFile.
std::vector<PredictionRow> read_predictions(const std::filesystem::path& path);

/// Loads summary.csv (and results.csv, when `with_scores` is set) from each
/// path. A path may be a directory holding those files or a summary file.
/// Throws MalformedFile / Io.
GridResult read_grid(std::span<const std::filesystem::path> paths, bool with_scores);

}  // namespace rankfolio::cli
