#include "rankfolio/grid.hpp"

#include <atomic>
#include <exception>
#include <map>
#include <set>
#include <thread>

#include "rankfolio/error.hpp"

namespace rankfolio {

ComboKey combo_key(std::string_view token, Strategy strategy) {
  std::string clf(token);
  std::string reg(token);
  if (const auto plus = token.find('+'); plus != std::string_view::npos) {
    clf = std::string(token.substr(0, plus));
    reg = std::string(token.substr(plus + 1));
  }
  ComboKey key;
  if (needs_classifier(strategy)) key.classifier = clf;
  if (needs_regressor(strategy)) key.regressor = reg;
  return key;
}

ResolvedCombo resolve_combo(std::string_view token, Strategy strategy, const LearnerRegistry& registry) {
  ResolvedCombo out{{}, combo_key(token, strategy)};
  if (needs_classifier(strategy)) {
    out.learners.classifier = registry.classifier(out.key.classifier);
    if (!out.learners.classifier) {
      throw Error(ErrorCode::UnknownLearner, "'" + out.key.classifier + "' is not a classifier; strategy '" +
                                                 std::string(strategy_name(strategy)) + "' needs one");
    }
  }
  if (needs_regressor(strategy)) {
    out.learners.regressor = registry.regressor(out.key.regressor);
    if (!out.learners.regressor) {
      throw Error(ErrorCode::UnknownLearner, "'" + out.key.regressor + "' is not a regressor; strategy '" +
                                                 std::string(strategy_name(strategy)) + "' needs one");
    }
  }
  return out;
}

std::vector<std::string> expand_combos(std::span<const std::string> tokens, Strategy strategy,
                                       const LearnerRegistry& registry) {
  std::vector<std::string> out;
  for (const auto& token : tokens) {
    if (token != "all") {
      out.push_back(token);
      continue;
    }
    const bool clf = needs_classifier(strategy);
    const bool reg = needs_regressor(strategy);
    if (clf && reg) {
      for (const auto& c : registry.classifier_names()) {
        for (const auto& r : registry.regressor_names()) out.push_back(c + "+" + r);
      }
    } else {
      const auto names = clf ? registry.classifier_names() : registry.regressor_names();
      out.insert(out.end(), names.begin(), names.end());
    }
  }
  return out;
}

GridResult GridRun::complete_result() const {
  std::set<std::string> datasets;
  for (const auto& cell : cells) datasets.insert(cell.dataset);

  // combos with a failure on any data set drop out for that strategy
  std::map<std::pair<Strategy, ComboKey>, std::size_t> successes;
  for (const auto& cell : cells) {
    if (cell.ok) ++successes[{cell.strategy, cell.combo}];
  }
  GridResult result;
  for (const auto& cell : cells) {
    if (!cell.ok || successes[{cell.strategy, cell.combo}] != datasets.size()) continue;
    result.add(CellKey{cell.dataset, cell.strategy, cell.combo}, cell.result);
  }
  return result;
}

GridRun run_grid(std::span<const Scenario> scenarios, std::span<const Strategy> strategies,
                 std::span<const std::string> combo_tokens, const LearnerRegistry& registry,
                 const GridOptions& options, const PredictionObserver& observer) {
  std::set<std::string> names;
  for (const auto& s : scenarios) {
    if (!names.insert(s.name()).second) {
      throw Error(ErrorCode::InvalidSpec, "two scenarios are named '" + s.name() + "'");
    }
  }

  struct Job {
    const Scenario* scenario;
    Strategy strategy;
    std::string token;
  };
  std::vector<Job> jobs;
  for (const auto& scenario : scenarios) {
    for (Strategy strategy : strategies) {
      for (auto& token : expand_combos(combo_tokens, strategy, registry)) {
        jobs.push_back({&scenario, strategy, std::move(token)});
      }
    }
  }

  GridRun run;
  run.cells.resize(jobs.size());
  auto execute = [&](std::size_t j) {
    const Job& job = jobs[j];
    GridCell& cell = run.cells[j];
    cell.dataset = job.scenario->name();
    cell.strategy = job.strategy;
    cell.token = job.token;
    cell.combo = combo_key(job.token, job.strategy);
    try {
      const auto combo = resolve_combo(job.token, job.strategy, registry);
      auto scores = run_cross_validation(*job.scenario, job.strategy, combo.learners, options.cv, observer);
      std::vector<double> rhos;
      rhos.reserve(scores.size());
      for (const auto& s : scores) rhos.push_back(s.rho);
      cell.result = CellResult{quartiles(rhos), std::move(scores)};
      cell.ok = true;
    } catch (const std::exception& e) {
      cell.ok = false;
      cell.error = e.what();
    }
  };

  if (options.threads == 0 || jobs.size() < 2) {
    for (std::size_t j = 0; j < jobs.size(); ++j) execute(j);
    return run;
  }
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> workers;
    const std::size_t count = std::min(options.threads, jobs.size());
    for (std::size_t w = 0; w < count; ++w) {
      workers.emplace_back([&] {
        for (std::size_t j = next++; j < jobs.size(); j = next++) execute(j);
      });
    }
  }
  return run;
}

}  // namespace rankfolio
