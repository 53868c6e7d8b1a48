#include "rankfolio/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <json.hpp>

#include "rankfolio/csv.hpp"
#include "rankfolio/error.hpp"

namespace rankfolio {

std::string_view to_string(RunStatus status) noexcept {
  switch (status) {
    case RunStatus::Ok: return "ok";
    case RunStatus::Timeout: return "timeout";
    case RunStatus::Memout: return "memout";
  }
  return "ok";
}

std::optional<RunStatus> parse_status(std::string_view text) noexcept {
  if (text == "ok") return RunStatus::Ok;
  if (text == "timeout") return RunStatus::Timeout;
  if (text == "memout") return RunStatus::Memout;
  return std::nullopt;
}

bool is_missing(double value) noexcept { return std::isnan(value); }

PerformanceMatrix::PerformanceMatrix(std::size_t instances, std::size_t algorithms,
                                     std::vector<PerformanceRecord> records)
    : instances_(instances), algorithms_(algorithms), records_(std::move(records)) {
  if (records_.size() != instances_ * algorithms_) {
    throw Error(ErrorCode::MissingPerformance,
                "performance matrix holds " + std::to_string(records_.size()) +
                    " records, expected " + std::to_string(instances_ * algorithms_));
  }
}

const PerformanceRecord& PerformanceMatrix::at(std::size_t instance, AlgorithmIndex algorithm) const {
  return records_.at(instance * algorithms_ + algorithm);
}

std::vector<double> PerformanceMatrix::runtimes(std::size_t instance) const {
  std::vector<double> out(algorithms_);
  for (AlgorithmIndex a = 0; a < algorithms_; ++a) out[a] = runtime(instance, a);
  return out;
}

Scenario::Scenario(std::string name, std::vector<std::string> algorithms,
                   std::vector<std::string> feature_names, double timeout,
                   std::vector<Instance> instances, PerformanceMatrix performance)
    : name_(std::move(name)),
      algorithms_(std::move(algorithms)),
      feature_names_(std::move(feature_names)),
      timeout_(timeout),
      instances_(std::move(instances)),
      performance_(std::move(performance)) {
  if (algorithms_.size() < 2) {
    throw Error(ErrorCode::InvalidSpec, "a portfolio needs at least 2 algorithms (n >= 2)");
  }
  if (!(timeout_ > 0.0) || !std::isfinite(timeout_)) {
    throw Error(ErrorCode::InvalidSpec, "timeout must be a positive number of seconds");
  }
  for (AlgorithmIndex a = 0; a < algorithms_.size(); ++a) {
    if (!algorithm_index_.emplace(algorithms_[a], a).second) {
      throw Error(ErrorCode::DuplicateId, "algorithm '" + algorithms_[a] + "' listed twice");
    }
  }
  for (std::size_t i = 0; i < instances_.size(); ++i) {
    const Instance& inst = instances_[i];
    if (!instance_index_.emplace(inst.id, i).second) {
      throw Error(ErrorCode::DuplicateId, "instance '" + inst.id + "' listed twice");
    }
    if (inst.features.size() != feature_names_.size()) {
      throw Error(ErrorCode::FeatureArityMismatch,
                  "instance '" + inst.id + "' has " + std::to_string(inst.features.size()) +
                      " features, expected " + std::to_string(feature_names_.size()));
    }
  }
  if (performance_.instance_count() != instances_.size() ||
      performance_.algorithm_count() != algorithms_.size()) {
    throw Error(ErrorCode::MissingPerformance, "performance matrix shape does not match scenario");
  }
  for (std::size_t i = 0; i < instances_.size(); ++i) {
    for (AlgorithmIndex a = 0; a < algorithms_.size(); ++a) {
      const PerformanceRecord& rec = performance_.at(i, a);
      const bool censored = rec.status != RunStatus::Ok;
      if (!(rec.runtime > 0.0) || rec.runtime > timeout_ || (censored && rec.runtime != timeout_)) {
        throw Error(ErrorCode::InvalidSpec,
                    "record (" + instances_[i].id + ", " + algorithms_[a] +
                        ") violates 0 < runtime <= timeout or censoring rule");
      }
    }
  }
}

std::optional<std::size_t> Scenario::find_instance(std::string_view id) const {
  const auto it = instance_index_.find(std::string(id));
  if (it == instance_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<AlgorithmIndex> Scenario::find_algorithm(std::string_view id) const {
  const auto it = algorithm_index_.find(std::string(id));
  if (it == algorithm_index_.end()) return std::nullopt;
  return it->second;
}

bool operator==(const Scenario& a, const Scenario& b) {
  if (a.name_ != b.name_ || a.algorithms_ != b.algorithms_ ||
      a.feature_names_ != b.feature_names_ || a.timeout_ != b.timeout_ ||
      a.performance_ != b.performance_ || a.instances_.size() != b.instances_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.instances_.size(); ++i) {
    const auto& fa = a.instances_[i].features;
    const auto& fb = b.instances_[i].features;
    if (a.instances_[i].id != b.instances_[i].id || fa.size() != fb.size()) return false;
    for (std::size_t f = 0; f < fa.size(); ++f) {
      if (is_missing(fa[f]) != is_missing(fb[f])) return false;
      if (!is_missing(fa[f]) && fa[f] != fb[f]) return false;
    }
  }
  return true;
}

double censored_runtime(std::optional<double> raw, RunStatus status, double timeout) {
  if (!(timeout > 0.0)) throw Error(ErrorCode::InvalidSpec, "timeout must be > 0");
  if (raw && *raw < 0.0) {
    throw Error(ErrorCode::NegativeRuntime, "negative runtime " + format_number(*raw));
  }
  if (status != RunStatus::Ok || !raw) return timeout;
  return std::clamp(*raw, std::min(kMinRuntime, timeout), timeout);
}

Ranking true_ranking(const PerformanceMatrix& matrix, std::size_t instance) {
  const auto runtimes = matrix.runtimes(instance);
  return Ranking{fractional_ranks(runtimes)};
}

AlgorithmIndex best_algorithm(const PerformanceMatrix& matrix, std::size_t instance) {
  AlgorithmIndex best = 0;
  for (AlgorithmIndex a = 1; a < matrix.algorithm_count(); ++a) {
    if (matrix.runtime(instance, a) < matrix.runtime(instance, best)) best = a;
  }
  return best;
}

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  return out;
}

}  // namespace

Scenario load_scenario(const std::filesystem::path& root) {
  const auto meta_path = root / "meta.json";
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(read_text(meta_path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedFile, meta_path.string() + ": " + e.what());
  }
  std::string name;
  double timeout = 0.0;
  std::vector<std::string> algorithms;
  try {
    name = meta.at("name").get<std::string>();
    timeout = meta.at("timeout").get<double>();
    algorithms = meta.at("algorithms").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedFile, meta_path.string() + ": " + e.what());
  }
  if (!(timeout > 0.0)) throw Error(ErrorCode::MalformedFile, meta_path.string() + ": timeout must be > 0");

  const auto features = csv::read_file(root / "features.csv");
  if (features.header.empty() || features.header.front() != "instance") {
    throw Error(ErrorCode::MalformedFile, "features.csv: first column must be 'instance'");
  }
  std::vector<std::string> feature_names(features.header.begin() + 1, features.header.end());
  std::vector<Instance> instances;
  instances.reserve(features.rows.size());
  for (const auto& row : features.rows) {
    Instance inst{row.front(), {}};
    inst.features.reserve(feature_names.size());
    for (std::size_t f = 1; f < row.size(); ++f) {
      if (row[f].empty() || row[f] == "?") {
        inst.features.push_back(kMissingFeature);
        continue;
      }
      const auto value = csv::parse_double(row[f]);
      if (!value) {
        throw Error(ErrorCode::MalformedFile, "features.csv: instance '" + inst.id +
                                                  "' has non-numeric value '" + row[f] + "'");
      }
      inst.features.push_back(*value);
    }
    instances.push_back(std::move(inst));
  }

  std::unordered_map<std::string, std::size_t> instance_index;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (!instance_index.emplace(instances[i].id, i).second) {
      throw Error(ErrorCode::DuplicateId, "instance '" + instances[i].id + "' listed twice");
    }
  }
  std::unordered_map<std::string, AlgorithmIndex> algorithm_index;
  for (AlgorithmIndex a = 0; a < algorithms.size(); ++a) {
    if (!algorithm_index.emplace(algorithms[a], a).second) {
      throw Error(ErrorCode::DuplicateId, "algorithm '" + algorithms[a] + "' listed twice");
    }
  }

  const auto runtimes = csv::read_file(root / "runtimes.csv");
  const auto col_instance = runtimes.column("instance");
  const auto col_algorithm = runtimes.column("algorithm");
  const auto col_runtime = runtimes.column("runtime");
  const auto col_status = runtimes.column("status");
  if (!col_instance || !col_algorithm || !col_runtime || !col_status) {
    throw Error(ErrorCode::MalformedFile,
                "runtimes.csv: header must contain instance,algorithm,runtime,status");
  }

  const std::size_t n = algorithms.size();
  std::vector<PerformanceRecord> records(instances.size() * n);
  std::vector<bool> seen(records.size(), false);
  for (const auto& row : runtimes.rows) {
    const auto inst = instance_index.find(row[*col_instance]);
    const auto alg = algorithm_index.find(row[*col_algorithm]);
    if (inst == instance_index.end() || alg == algorithm_index.end()) {
      throw Error(ErrorCode::MalformedFile, "runtimes.csv: unknown pair (" + row[*col_instance] +
                                                ", " + row[*col_algorithm] + ")");
    }
    const auto status = parse_status(row[*col_status]);
    if (!status) {
      throw Error(ErrorCode::MalformedFile, "runtimes.csv: unknown status '" + row[*col_status] + "'");
    }
    std::optional<double> raw;
    if (!row[*col_runtime].empty()) {
      raw = csv::parse_double(row[*col_runtime]);
      if (!raw) {
        throw Error(ErrorCode::MalformedFile,
                    "runtimes.csv: non-numeric runtime '" + row[*col_runtime] + "'");
      }
    } else if (*status == RunStatus::Ok) {
      throw Error(ErrorCode::MalformedFile, "runtimes.csv: status ok requires a runtime for (" +
                                                row[*col_instance] + ", " + row[*col_algorithm] + ")");
    }
    const std::size_t slot = inst->second * n + alg->second;
    if (seen[slot]) {
      throw Error(ErrorCode::DuplicateId, "runtimes.csv: duplicate record for (" +
                                              row[*col_instance] + ", " + row[*col_algorithm] + ")");
    }
    seen[slot] = true;
    records[slot] = PerformanceRecord{censored_runtime(raw, *status, timeout), *status};
  }
  for (std::size_t slot = 0; slot < seen.size(); ++slot) {
    if (!seen[slot]) {
      throw Error(ErrorCode::MissingPerformance, "no runtime record for (" +
                                                     instances[slot / n].id + ", " +
                                                     algorithms[slot % n] + ")");
    }
  }

  return Scenario(std::move(name), std::move(algorithms), std::move(feature_names), timeout,
                  std::move(instances),
                  PerformanceMatrix(instance_index.size(), n, std::move(records)));
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& root) {
  std::error_code ec;
  std::filesystem::create_directories(root, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + root.string() + ": " + ec.message());

  nlohmann::ordered_json meta;
  meta["name"] = scenario.name();
  meta["timeout"] = scenario.timeout();
  meta["algorithms"] = scenario.algorithms();
  {
    auto out = open_for_write(root / "meta.json");
    out << meta.dump(2) << '\n';
  }
  {
    auto out = open_for_write(root / "features.csv");
    std::vector<std::string> header{"instance"};
    header.insert(header.end(), scenario.feature_names().begin(), scenario.feature_names().end());
    csv::write_row(out, header);
    for (const auto& inst : scenario.instances()) {
      std::vector<std::string> row{inst.id};
      for (double v : inst.features) row.push_back(is_missing(v) ? "?" : format_number(v));
      csv::write_row(out, row);
    }
  }
  {
    auto out = open_for_write(root / "runtimes.csv");
    csv::write_row(out, {"instance", "algorithm", "runtime", "status"});
    const auto& perf = scenario.performance();
    for (std::size_t i = 0; i < scenario.instance_count(); ++i) {
      for (AlgorithmIndex a = 0; a < scenario.algorithm_count(); ++a) {
        const auto& rec = perf.at(i, a);
        csv::write_row(out, {scenario.instances()[i].id, scenario.algorithms()[a],
                             format_number(rec.runtime), std::string(to_string(rec.status))});
      }
    }
    if (!out) throw Error(ErrorCode::Io, "write failed for " + (root / "runtimes.csv").string());
  }
}

}  // namespace rankfolio
