#include "cli/commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "cli/report.hpp"
#include "cli/results_io.hpp"
#include "rankfolio/csv.hpp"
#include "rankfolio/error.hpp"
#include "rankfolio/grid.hpp"
#include "rankfolio/portfolio_sim.hpp"
#include "rankfolio/scenario.hpp"
#include "rankfolio/statistics.hpp"
#include "rankfolio/synthetic.hpp"

namespace rankfolio::cli {

namespace fs = std::filesystem;

std::size_t worker_threads_from_env() {
  if (const char* value = std::getenv("RANKFOLIO_THREADS")) {
    char* end = nullptr;
    const long parsed = std::strtol(value, &end, 10);
    if (end != value && *end == '\0' && parsed >= 0) return static_cast<std::size_t>(parsed);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

/// Usage problem detected by a command itself (not by the library).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  return out;
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
}

Strategy strategy_or_throw(const std::string& name) {
  const auto s = parse_strategy(name);
  if (!s) throw UsageError("unknown strategy '" + name + "'");
  return *s;
}

std::vector<Strategy> strategies_from(const std::vector<std::string>& names) {
  std::vector<Strategy> out;
  for (const auto& name : names) {
    if (name == "all") {
      out.insert(out.end(), kAllStrategies.begin(), kAllStrategies.end());
    } else {
      out.push_back(strategy_or_throw(name));
    }
  }
  return out;
}

StackingMode stacking_from(const std::string& name) {
  return name == "resub" ? StackingMode::Resubstitution : StackingMode::OutOfFold;
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  SyntheticSpec spec;
  std::uint64_t seed = 0;
  std::string out;
  std::string name;
};

int cmd_generate(const GenerateArgs& args, std::ostream& out) {
  SyntheticSpec spec = args.spec;
  spec.name = args.name.empty() ? fs::path(args.out).filename().string() : args.name;
  if (spec.name.empty()) spec.name = "synthetic";
  const auto scenario = generate_synthetic(spec, args.seed);
  save_scenario(scenario, args.out);

  std::size_t censored = 0;
  for (std::size_t i = 0; i < scenario.instance_count(); ++i) {
    for (AlgorithmIndex a = 0; a < scenario.algorithm_count(); ++a) {
      if (scenario.performance().at(i, a).status != RunStatus::Ok) ++censored;
    }
  }
  out << "wrote " << args.out << ": " << scenario.instance_count() << " instances, "
      << scenario.algorithm_count() << " algorithms, " << scenario.feature_count() << " features, "
      << censored << " censored runs\n";
  return kExitOk;
}

int cmd_validate(const std::string& path, std::ostream& out) {
  const auto scenario = load_scenario(path);
  std::size_t missing = 0;
  for (const auto& inst : scenario.instances()) {
    missing += static_cast<std::size_t>(std::count_if(inst.features.begin(), inst.features.end(), is_missing));
  }
  out << scenario.name() << ": " << scenario.instance_count() << " instances, "
      << scenario.algorithm_count() << " algorithms, " << scenario.feature_count() << " features, "
      << missing << " missing feature values, timeout " << format_number(scenario.timeout()) << " s\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct EvaluateArgs {
  std::string scenario;
  std::string strategy;
  std::string classifier;
  std::string regressor;
  std::size_t folds = 10;
  std::size_t inner_folds = 5;
  std::uint64_t seed = 0;
  std::string stacking = "oof";
  std::string out;
};

int cmd_evaluate(const EvaluateArgs& args, const LearnerRegistry& registry, std::ostream& out) {
  const auto scenario = load_scenario(args.scenario);
  const Strategy strategy = strategy_or_throw(args.strategy);

  LearnerCombo combo;
  ComboKey key;
  if (!args.classifier.empty()) {
    combo.classifier = registry.classifier(args.classifier);
    if (!combo.classifier) throw Error(ErrorCode::UnknownLearner, "'" + args.classifier + "' is not a classifier");
  }
  if (!args.regressor.empty()) {
    combo.regressor = registry.regressor(args.regressor);
    if (!combo.regressor) throw Error(ErrorCode::UnknownLearner, "'" + args.regressor + "' is not a regressor");
  }
  if (needs_classifier(strategy) && combo.classifier) key.classifier = args.classifier;
  if (needs_regressor(strategy) && combo.regressor) key.regressor = args.regressor;

  std::vector<PredictionRow> predictions;
  const CrossValidationOptions options{args.folds, args.seed, args.inner_folds, stacking_from(args.stacking)};
  const auto scores = run_cross_validation(
      scenario, strategy, combo, options, [&](std::size_t instance, const RankPrediction& prediction) {
        predictions.push_back({scenario.instances()[instance].id, prediction});
      });

  std::vector<double> rhos;
  for (const auto& s : scores) rhos.push_back(s.rho);
  const auto summary = quartiles(rhos);
  const CellKey cell{scenario.name(), strategy, key};

  make_dir(args.out);
  {
    auto f = open_output(fs::path(args.out) / kResultsFile);
    write_results_header(f);
    write_results_rows(f, cell, scores);
  }
  {
    auto f = open_output(fs::path(args.out) / kSummaryFile);
    write_summary_header(f);
    write_summary_row(f, cell, summary);
  }
  {
    auto f = open_output(fs::path(args.out) / kPredictionsFile);
    write_predictions(f, predictions);
  }
  out << strategy_name(strategy) << " (" << key.label() << ") on " << scenario.name() << ": "
      << scores.size() << " instances, median rho " << format_rounded(summary.median)
      << ", quartile sum " << format_rounded(summary.quartile_sum()) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct GridArgs {
  std::vector<std::string> scenarios;
  std::vector<std::string> strategies{"all"};
  std::vector<std::string> combos{"all"};
  std::size_t folds = 10;
  std::size_t inner_folds = 5;
  std::uint64_t seed = 0;
  std::string stacking = "oof";
  std::string out;
};

int cmd_grid(const GridArgs& args, const LearnerRegistry& registry, std::ostream& out) {
  if (args.scenarios.empty()) throw UsageError("grid needs at least one scenario");
  std::vector<Scenario> scenarios;
  for (const auto& path : args.scenarios) scenarios.push_back(load_scenario(path));
  const auto strategies = strategies_from(args.strategies);

  GridOptions options;
  options.cv = CrossValidationOptions{args.folds, args.seed, args.inner_folds, stacking_from(args.stacking)};
  options.threads = worker_threads_from_env();
  const auto run = run_grid(scenarios, strategies, args.combos, registry, options);
  const auto complete = run.complete_result();

  make_dir(args.out);
  const fs::path dir(args.out);
  std::size_t failed = 0;
  {
    auto index = open_output(dir / kIndexFile);
    auto results = open_output(dir / kResultsFile);
    auto summary = open_output(dir / kSummaryFile);
    csv::write_row(index, {"dataset", "strategy", "classifier", "regressor", "status", "message"});
    write_results_header(results);
    write_summary_header(summary);
    for (const auto& cell : run.cells) {
      const CellKey key{cell.dataset, cell.strategy, cell.combo};
      csv::write_row(index, {cell.dataset, std::string(strategy_name(cell.strategy)), cell.combo.classifier,
                             cell.combo.regressor, cell.ok ? "ok" : "error", cell.error});
      if (!cell.ok) {
        ++failed;
        continue;
      }
      write_results_rows(results, key, cell.result.scores);
      write_summary_row(summary, key, cell.result.summary);
    }
  }
  {
    auto selection = open_output(dir / kSelectionFile);
    csv::write_row(selection, {"strategy", "choice", "classifier", "regressor", "quartile_sum"});
    for (Strategy strategy : complete.strategies()) {
      const auto bw = select_best_worst(complete, strategy);
      const std::string name(strategy_name(strategy));
      csv::write_row(selection, {name, "best", bw.best.classifier, bw.best.regressor, format_number(bw.best_sum)});
      csv::write_row(selection,
                     {name, "worst", bw.worst.classifier, bw.worst.regressor, format_number(bw.worst_sum)});
    }
  }
  out << "grid: " << run.cells.size() << " cells, " << failed << " failed; wrote " << args.out << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

ReportMode mode_from(const std::string& name) { return name == "worst" ? ReportMode::Worst : ReportMode::Best; }

std::vector<fs::path> as_paths(const std::vector<std::string>& names) {
  return {names.begin(), names.end()};
}

struct ReportArgs {
  std::vector<std::string> results;
  std::string format = "md";
  std::string mode = "best";
  std::string out;
};

int cmd_report(const ReportArgs& args, std::ostream& out) {
  const auto grid = read_grid(as_paths(args.results), false);
  if (grid.cells().empty()) throw UsageError("no results found in the given files");
  const auto mode = mode_from(args.mode);
  const auto table = build_report(grid, mode);
  const std::string rendered = args.format == "csv" ? render_csv(table) : render_markdown(table, mode);
  out << rendered;
  if (!args.out.empty()) {
    make_dir(args.out);
    auto report = open_output(fs::path(args.out) / (args.format == "csv" ? "report.csv" : "report.md"));
    report << rendered;
    auto boxplot = open_output(fs::path(args.out) / kBoxplotFile);
    boxplot << render_boxplot(table);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct StatsArgs {
  std::vector<std::string> results;
  std::string test;
  std::string level = "quartiles";
  std::vector<std::string> strategies;
  std::string mode = "best";
};

int cmd_stats(const StatsArgs& args, std::ostream& out) {
  const bool instances = args.level == "instances";
  const auto grid = read_grid(as_paths(args.results), instances);
  if (grid.cells().empty()) throw UsageError("no results found in the given files");

  std::vector<Strategy> strategies = args.strategies.empty() ? grid.strategies() : strategies_from(args.strategies);
  const bool kw = args.test == "kw";
  if (kw && strategies.size() < 2) {
    throw UsageError("Kruskal-Wallis needs at least 2 strategies, found " + std::to_string(strategies.size()));
  }
  if (!kw && strategies.size() != 2) {
    throw UsageError("Wilcoxon needs exactly 2 strategies, found " + std::to_string(strategies.size()));
  }

  const auto mode = mode_from(args.mode);
  const auto datasets = grid.datasets();
  std::vector<std::vector<double>> series;
  std::vector<std::vector<std::string>> series_keys;
  for (Strategy strategy : strategies) {
    const auto bw = select_best_worst(grid, strategy);
    const ComboKey combo = mode == ReportMode::Best ? bw.best : bw.worst;
    std::vector<double> values;
    std::vector<std::string> keys;
    for (const auto& dataset : datasets) {
      const auto* cell = grid.find(CellKey{dataset, strategy, combo});
      if (instances) {
        auto scores = cell->scores;
        std::sort(scores.begin(), scores.end(),
                  [](const InstanceScore& a, const InstanceScore& b) { return a.instance < b.instance; });
        for (const auto& s : scores) {
          values.push_back(s.rho);
          keys.push_back(dataset + "/" + s.instance);
        }
      } else {
        values.insert(values.end(), {cell->summary.q1, cell->summary.median, cell->summary.q3});
        keys.insert(keys.end(), {dataset + "/q1", dataset + "/median", dataset + "/q3"});
      }
    }
    series.push_back(std::move(values));
    series_keys.push_back(std::move(keys));
  }

  TestResult result;
  if (kw) {
    result = kruskal_wallis(series);
  } else {
    if (series_keys[0] != series_keys[1]) {
      throw UsageError("Wilcoxon needs paired series; the two strategies cover different instances");
    }
    result = wilcoxon_signed_rank(series[0], series[1]);
  }

  out << "test: " << result.test << '\n';
  out << "series: " << (instances ? "per-instance scores" : "per-dataset quartiles (q1, median, q3)")
      << ", " << (mode == ReportMode::Best ? "best" : "worst") << " combo per strategy\n";
  out << "strategies:";
  for (Strategy s : strategies) out << ' ' << strategy_name(s);
  out << '\n';
  out << (kw ? "H = " : "W = ") << format_number(result.statistic) << '\n';
  out << "p = " << format_number(result.p_value) << '\n';
  out << "method: " << result.method << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string scenario;
  std::string predictions;
  double budget = 0.0;
  std::string policy = "equal";
  std::size_t top_n = 1;
  std::string out;
};

int cmd_simulate(const SimulateArgs& args, std::ostream& out) {
  const auto scenario = load_scenario(args.scenario);
  const auto rows = read_predictions(args.predictions);
  const bool proportional = args.policy == "proportional";

  std::ostringstream report;
  csv::write_row(report, {"instance", "policy", "budget", "solved", "solver", "elapsed"});
  std::size_t solved = 0;
  double elapsed = 0.0;
  for (const auto& row : rows) {
    const auto instance = scenario.find_instance(row.instance);
    if (!instance) throw UsageError("prediction for unknown instance '" + row.instance + "'");
    if (row.prediction.ranking.size() != scenario.algorithm_count()) {
      throw Error(ErrorCode::UnknownAlgorithm, "prediction for '" + row.instance + "' ranks " +
                                                   std::to_string(row.prediction.ranking.size()) +
                                                   " algorithms, scenario has " +
                                                   std::to_string(scenario.algorithm_count()));
    }
    const Schedule schedule = proportional ? schedule_proportional(row.prediction, args.budget)
                                           : schedule_equal_slices(row.prediction.ranking, args.budget, args.top_n);
    const auto outcome = simulate(schedule, scenario.performance().runtimes(*instance), scenario.timeout());
    if (outcome.solved) ++solved;
    elapsed += outcome.elapsed;
    csv::write_row(report, {row.instance, args.policy, format_number(args.budget), outcome.solved ? "1" : "0",
                            outcome.solver ? scenario.algorithms()[*outcome.solver] : "",
                            format_number(outcome.elapsed)});
  }
  if (args.out.empty()) {
    out << report.str();
  } else {
    auto f = open_output(args.out);
    f << report.str();
  }
  const double mean = rows.empty() ? 0.0 : elapsed / static_cast<double>(rows.size());
  out << "solved " << solved << "/" << rows.size() << ", mean elapsed " << format_rounded(mean) << " s\n";
  return kExitOk;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err, const LearnerRegistry& registry) {
  CLI::App app{"rankfolio: per-instance algorithm ranking prediction and evaluation", "rankfolio"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a synthetic scenario directory");
  generate->add_option("--instances", gen.spec.instances, "Number of instances")->capture_default_str();
  generate->add_option("--algorithms", gen.spec.algorithms, "Portfolio size n (>= 2)")->capture_default_str();
  generate->add_option("--features", gen.spec.features, "Features per instance")->capture_default_str();
  generate->add_option("--noise", gen.spec.noise, "Log-normal runtime noise sigma")->capture_default_str();
  generate->add_option("--censor", gen.spec.censor_fraction, "Fraction of instances with censored runs")
      ->capture_default_str();
  generate->add_option("--missing", gen.spec.missing_fraction, "Fraction of missing feature values")
      ->capture_default_str();
  generate->add_option("--timeout", gen.spec.timeout, "Timeout in seconds")->capture_default_str();
  generate->add_option("--name", gen.name, "Scenario name (default: output directory name)");
  generate->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
  generate->add_option("--out", gen.out, "Output directory")->required();

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Load and check a scenario directory");
  validate->add_option("--scenario", validate_path, "Scenario directory")->required();

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Cross-validate one strategy and learner combo");
  evaluate->add_option("--scenario", ev.scenario, "Scenario directory")->required();
  evaluate->add_option("--strategy", ev.strategy, "Ranking strategy")->required();
  evaluate->add_option("--classifier", ev.classifier, "Classifier name");
  evaluate->add_option("--regressor", ev.regressor, "Regressor name");
  evaluate->add_option("--folds", ev.folds, "Cross-validation folds")->capture_default_str();
  evaluate->add_option("--inner-folds", ev.inner_folds, "Inner folds for stacked layers")->capture_default_str();
  evaluate->add_option("--stacking", ev.stacking, "oof or resub")
      ->check(CLI::IsMember({"oof", "resub"}))->capture_default_str();
  evaluate->add_option("--seed", ev.seed, "Random seed")->capture_default_str();
  evaluate->add_option("--out", ev.out, "Output directory")->required();

  GridArgs gr;
  auto* grid = app.add_subcommand("grid", "Cross-validate every scenario x strategy x combo cell");
  grid->add_option("--scenarios", gr.scenarios, "Scenario directories")->required()->delimiter(',');
  grid->add_option("--strategies", gr.strategies, "Strategies or 'all'")->delimiter(',')->capture_default_str();
  grid->add_option("--combos", gr.combos, "Combo tokens (name or classifier+regressor) or 'all'")
      ->delimiter(',')->capture_default_str();
  grid->add_option("--folds", gr.folds, "Cross-validation folds")->capture_default_str();
  grid->add_option("--inner-folds", gr.inner_folds, "Inner folds for stacked layers")->capture_default_str();
  grid->add_option("--stacking", gr.stacking, "oof or resub")
      ->check(CLI::IsMember({"oof", "resub"}))->capture_default_str();
  grid->add_option("--seed", gr.seed, "Random seed")->capture_default_str();
  grid->add_option("--out", gr.out, "Output directory")->required();

  ReportArgs rep;
  auto* report = app.add_subcommand("report", "Quartile-sum table and boxplot data");
  report->add_option("--results", rep.results, "Result directories or summary files")->required()->delimiter(',');
  report->add_option("--format", rep.format, "md or csv")->check(CLI::IsMember({"md", "csv"}))->capture_default_str();
  report->add_option("--mode", rep.mode, "best or worst")->check(CLI::IsMember({"best", "worst"}))->capture_default_str();
  report->add_option("--out", rep.out, "Directory for report and boxplot.csv");

  StatsArgs st;
  auto* stats = app.add_subcommand("stats", "Kruskal-Wallis or Wilcoxon signed-rank test across strategies");
  stats->add_option("--results", st.results, "Result directories or summary files")->required()->delimiter(',');
  stats->add_option("--test", st.test, "kw or wilcoxon")->required()->check(CLI::IsMember({"kw", "wilcoxon"}));
  stats->add_option("--level", st.level, "quartiles or instances")
      ->check(CLI::IsMember({"quartiles", "instances"}))->capture_default_str();
  stats->add_option("--strategies", st.strategies, "Strategies to compare (default: all present)")->delimiter(',');
  stats->add_option("--mode", st.mode, "best or worst")->check(CLI::IsMember({"best", "worst"}))->capture_default_str();

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Run ranking-driven schedules against true runtimes");
  simulate_cmd->add_option("--scenario", sim.scenario, "Scenario directory")->required();
  simulate_cmd->add_option("--predictions", sim.predictions, "Predictions CSV")->required();
  simulate_cmd->add_option("--budget", sim.budget, "Time budget per instance (s)")->required();
  simulate_cmd->add_option("--policy", sim.policy, "equal or proportional")
      ->check(CLI::IsMember({"equal", "proportional"}))->capture_default_str();
  simulate_cmd->add_option("--top-n", sim.top_n, "Algorithms in an equal-slice schedule")->capture_default_str();
  simulate_cmd->add_option("--out", sim.out, "Report CSV (default: stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (generate->parsed()) return cmd_generate(gen, out);
    if (validate->parsed()) return cmd_validate(validate_path, out);
    if (evaluate->parsed()) return cmd_evaluate(ev, registry, out);
    if (grid->parsed()) return cmd_grid(gr, registry, out);
    if (report->parsed()) return cmd_report(rep, out);
    if (stats->parsed()) return cmd_stats(st, out);
    if (simulate_cmd->parsed()) return cmd_simulate(sim, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::Io ? kExitIo : kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}

}  // namespace rankfolio::cli
