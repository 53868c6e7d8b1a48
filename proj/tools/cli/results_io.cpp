#include "cli/results_io.hpp"

#include <ostream>

#include "rankfolio/csv.hpp"
#include "rankfolio/error.hpp"

namespace rankfolio::cli {

namespace {

std::vector<std::string> key_fields(const CellKey& key) {
  return {key.dataset, std::string(strategy_name(key.strategy)), key.combo.classifier, key.combo.regressor};
}

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::MalformedFile, what); }

std::vector<std::size_t> require_columns(const csv::Table& table, std::span<const char* const> names,
                                         const std::string& source) {
  std::vector<std::size_t> out;
  for (const char* name : names) {
    const auto col = table.column(name);
    if (!col) malformed(source + ": missing column '" + name + "'");
    out.push_back(*col);
  }
  return out;
}

double number_field(const std::string& text, const std::string& source) {
  const auto value = csv::parse_double(text);
  if (!value) malformed(source + ": '" + text + "' is not a number");
  return *value;
}

CellKey parse_key(const std::vector<std::string>& row, std::span<const std::size_t> cols,
                  const std::string& source) {
  const auto strategy = parse_strategy(row[cols[1]]);
  if (!strategy) malformed(source + ": unknown strategy '" + row[cols[1]] + "'");
  return CellKey{row[cols[0]], *strategy, ComboKey{row[cols[2]], row[cols[3]]}};
}

}  // namespace

void write_results_header(std::ostream& out) {
  csv::write_row(out, {"dataset", "strategy", "classifier", "regressor", "fold", "instance", "rho",
                       "predicted", "actual"});
}

void write_results_rows(std::ostream& out, const CellKey& key, std::span<const InstanceScore> scores) {
  auto fields = key_fields(key);
  for (const auto& s : scores) {
    auto row = fields;
    row.insert(row.end(), {std::to_string(s.fold), s.instance, format_number(s.rho), s.predicted, s.actual});
    csv::write_row(out, row);
  }
}

void write_summary_header(std::ostream& out) {
  csv::write_row(out, {"dataset", "strategy", "classifier", "regressor", "min", "q1", "median", "q3", "max"});
}

void write_summary_row(std::ostream& out, const CellKey& key, const QuartileSummary& summary) {
  auto row = key_fields(key);
  for (double v : {summary.min, summary.q1, summary.median, summary.q3, summary.max}) {
    row.push_back(format_number(v));
  }
  csv::write_row(out, row);
}

void write_predictions(std::ostream& out, std::span<const PredictionRow> rows) {
  csv::write_row(out, {"instance", "level", "ranking_label", "scores"});
  for (const auto& row : rows) {
    std::string scores;
    if (row.prediction.scores) {
      for (std::size_t a = 0; a < row.prediction.scores->values.size(); ++a) {
        if (a > 0) scores += ';';
        scores += format_number(row.prediction.scores->values[a]);
      }
    }
    csv::write_row(out, {row.instance, std::string(to_string(row.prediction.level)),
                         encode_ranking_label(row.prediction.ranking), scores});
  }
}

std::vector<PredictionRow> read_predictions(const std::filesystem::path& path) {
  const auto table = csv::read_file(path);
  const std::string source = path.string();
  static constexpr const char* kColumns[] = {"instance", "level", "ranking_label", "scores"};
  const auto cols = require_columns(table, kColumns, source);

  std::vector<PredictionRow> rows;
  for (const auto& fields : table.rows) {
    PredictionRow row;
    row.instance = fields[cols[0]];
    const auto level = parse_level(fields[cols[1]]);
    if (!level) malformed(source + ": unknown level '" + fields[cols[1]] + "'");
    row.prediction.level = *level;
    try {
      row.prediction.ranking = decode_ranking_label(fields[cols[2]]);
    } catch (const Error& e) {
      malformed(source + ": " + e.what());
    }
    const std::string& score_text = fields[cols[3]];
    if (*level == PredictionLevel::R2) {
      Scores scores;
      std::size_t pos = 0;
      while (true) {
        const auto semi = score_text.find(';', pos);
        scores.values.push_back(number_field(score_text.substr(pos, semi - pos), source));
        if (semi == std::string::npos) break;
        pos = semi + 1;
      }
      if (scores.values.size() != row.prediction.ranking.size()) {
        malformed(source + ": instance '" + row.instance + "' has " + std::to_string(scores.values.size()) +
                  " scores for " + std::to_string(row.prediction.ranking.size()) + " ranks");
      }
      if (derive_ranking_from_scores(scores.values, ScoreDirection::HigherBetter) == row.prediction.ranking) {
        scores.direction = ScoreDirection::HigherBetter;
      } else if (derive_ranking_from_scores(scores.values, ScoreDirection::LowerBetter) ==
                 row.prediction.ranking) {
        scores.direction = ScoreDirection::LowerBetter;
      } else {
        malformed(source + ": scores of instance '" + row.instance + "' do not reproduce its ranking");
      }
      row.prediction.scores = std::move(scores);
    } else if (!score_text.empty()) {
      malformed(source + ": R1 prediction for '" + row.instance + "' must not carry scores");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

GridResult read_grid(std::span<const std::filesystem::path> paths, bool with_scores) {
  GridResult grid;
  std::map<CellKey, std::vector<InstanceScore>> scores;
  for (const auto& path : paths) {
    const bool is_dir = std::filesystem::is_directory(path);
    const auto summary_path = is_dir ? path / kSummaryFile : path;
    const auto table = csv::read_file(summary_path);
    const std::string source = summary_path.string();
    static constexpr const char* kColumns[] = {"dataset", "strategy", "classifier", "regressor",
                                               "min",     "q1",       "median",     "q3", "max"};
    const auto cols = require_columns(table, kColumns, source);
    for (const auto& row : table.rows) {
      const auto key = parse_key(row, cols, source);
      QuartileSummary s{number_field(row[cols[4]], source), number_field(row[cols[5]], source),
                        number_field(row[cols[6]], source), number_field(row[cols[7]], source),
                        number_field(row[cols[8]], source)};
      if (grid.find(key)) malformed(source + ": duplicate summary for a (dataset, strategy, combo) cell");
      grid.add(key, s);
    }

    if (!with_scores) continue;
    const auto results_path = (is_dir ? path : path.parent_path()) / kResultsFile;
    const auto results = csv::read_file(results_path);
    const std::string rsource = results_path.string();
    static constexpr const char* kResultColumns[] = {"dataset", "strategy", "classifier", "regressor",
                                                     "fold",    "instance", "rho"};
    const auto rcols = require_columns(results, kResultColumns, rsource);
    for (const auto& row : results.rows) {
      InstanceScore score;
      score.instance = row[rcols[5]];
      const auto fold = csv::parse_int(row[rcols[4]]);
      if (!fold || *fold < 0) malformed(rsource + ": bad fold '" + row[rcols[4]] + "'");
      score.fold = static_cast<std::size_t>(*fold);
      score.rho = number_field(row[rcols[6]], rsource);
      scores[parse_key(row, rcols, rsource)].push_back(std::move(score));
    }
  }
  if (with_scores) {
    GridResult merged;
    for (const auto& [key, cell] : grid.cells()) {
      auto it = scores.find(key);
      merged.add(key, CellResult{cell.summary, it == scores.end() ? std::vector<InstanceScore>{} : it->second});
    }
    // keep the data set order of the summaries
    GridResult ordered;
    for (const auto& dataset : grid.datasets()) {
      for (const auto& [key, cell] : merged.cells()) {
        if (key.dataset == dataset) ordered.add(key, cell);
      }
    }
    return ordered;
  }
  return grid;
}

}  // namespace rankfolio::cli
