#pragma once

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <unistd.h>

#include "rankfolio/error.hpp"
#include "rankfolio/learners.hpp"
#include "rankfolio/random.hpp"
#include "rankfolio/rankers.hpp"
#include "rankfolio/scenario.hpp"
#include "rankfolio/synthetic.hpp"

namespace rankfolio::support {

/// The code of the rankfolio::Error `fn` throws, or nullopt.
template <typename F>
std::optional<ErrorCode> error_code_of(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("rankfolio_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

/// A scenario with every instance's runtimes listed explicitly. Features are
/// the instance position and a constant.
inline Scenario scenario_from_runtimes(const std::vector<std::vector<double>>& runtimes, double timeout = 3600.0) {
  const std::size_t n = runtimes.front().size();
  std::vector<std::string> algorithms;
  for (std::size_t a = 0; a < n; ++a) algorithms.push_back("a" + std::to_string(a + 1));
  std::vector<Instance> instances;
  std::vector<PerformanceRecord> records;
  for (std::size_t i = 0; i < runtimes.size(); ++i) {
    instances.push_back({"i" + std::to_string(i + 1), {static_cast<double>(i), 1.0}});
    for (double rt : runtimes[i]) {
      const bool censored = rt >= timeout;
      records.push_back({censored ? timeout : rt, censored ? RunStatus::Timeout : RunStatus::Ok});
    }
  }
  return Scenario("fixture", algorithms, {"pos", "one"}, timeout, instances,
                  PerformanceMatrix(runtimes.size(), n, records));
}

/// Synthetic scenario with no censoring, no missing values and a timeout far
/// above any generated runtime, so true rankings are tie-free.
inline Scenario tie_free_scenario(std::size_t instances, std::size_t algorithms, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.instances = instances;
  spec.algorithms = algorithms;
  spec.censor_fraction = 0.0;
  spec.timeout = 1e12;
  spec.name = "tiefree";
  return generate_synthetic(spec, seed);
}

// ---------------------------------------------------------------------------
// Perfect-information regressor

/// Regressor that recognizes, at fit time, which scenario column its targets
/// were drawn from (a runtime column, its log, or a best-algorithm
/// indicator) and then answers with the true value for whatever instance the
/// query features belong to. Only meaningful on scenarios whose feature rows
/// are unique and free of missing values.
class OracleRegressorLearner final : public RegressorLearner {
 public:
  explicit OracleRegressorLearner(const Scenario& scenario, std::string name = "oracle")
      : scenario_(scenario), name_(std::move(name)) {
    for (std::size_t i = 0; i < scenario.instance_count(); ++i) index_.emplace(scenario.instances()[i].features, i);
  }
  const std::string& name() const noexcept override { return name_; }

  std::shared_ptr<const RegressorModel> fit(const RegressionSet& data) const override {
    for (AlgorithmIndex a = 0; a < scenario_.algorithm_count(); ++a) {
      for (Transform t : {Transform::Identity, Transform::Log}) {
        if (matches(data, a, t)) return std::make_shared<Model>(*this, a, t, data.rows.front().size());
      }
    }
    throw std::logic_error("oracle regressor: targets match no scenario column");
  }

 private:
  enum class Transform { Identity, Log };

  double truth(std::size_t instance, AlgorithmIndex a, Transform t) const {
    const double rt = scenario_.performance().runtime(instance, a);
    return t == Transform::Identity ? rt : log_runtime_target(rt);
  }
  std::size_t lookup(std::span<const double> features) const {
    const auto it = index_.find(FeatureRow(features.begin(), features.end()));
    if (it == index_.end()) throw std::logic_error("oracle regressor: unknown feature row");
    return it->second;
  }
  bool matches(const RegressionSet& data, AlgorithmIndex a, Transform t) const {
    for (std::size_t r = 0; r < data.rows.size(); ++r) {
      if (truth(lookup(data.rows[r]), a, t) != data.targets[r]) return false;
    }
    return true;
  }

  class Model final : public RegressorModel {
   public:
    Model(const OracleRegressorLearner& owner, AlgorithmIndex a, Transform t, std::size_t arity)
        : RegressorModel(arity), owner_(owner), algorithm_(a), transform_(t) {}

   private:
    double do_predict(std::span<const double> features) const override {
      return owner_.truth(owner_.lookup(features), algorithm_, transform_);
    }
    const OracleRegressorLearner& owner_;
    AlgorithmIndex algorithm_;
    Transform transform_;
  };

  const Scenario& scenario_;
  std::string name_;
  std::map<FeatureRow, std::size_t> index_;
};

// ---------------------------------------------------------------------------
// Leak detection

/// Wraps a real learner. Every fitted model remembers its training rows and
/// counts predictions made on one of them. Used to show that stacked layer-1
/// outputs never come from a model that saw the row.
class LeakCounter {
 public:
  void record(bool leaked) {
    ++predictions_;
    if (leaked) ++leaks_;
  }
  std::size_t predictions() const noexcept { return predictions_; }
  std::size_t leaks() const noexcept { return leaks_; }
  void reset() {
    predictions_ = 0;
    leaks_ = 0;
  }

 private:
  std::atomic<std::size_t> predictions_{0};
  std::atomic<std::size_t> leaks_{0};
};

class InstrumentedClassifierLearner final : public ClassifierLearner {
 public:
  InstrumentedClassifierLearner(std::shared_ptr<const ClassifierLearner> inner, LeakCounter& counter)
      : inner_(std::move(inner)), counter_(counter) {}
  const std::string& name() const noexcept override { return inner_->name(); }
  std::shared_ptr<const ClassifierModel> fit(const ClassificationSet& data) const override {
    return std::make_shared<Model>(inner_->fit(data), std::set<FeatureRow>(data.rows.begin(), data.rows.end()),
                                   counter_, data.rows.front().size());
  }

 private:
  class Model final : public ClassifierModel {
   public:
    Model(std::shared_ptr<const ClassifierModel> inner, std::set<FeatureRow> seen, LeakCounter& counter,
          std::size_t arity)
        : ClassifierModel(arity), inner_(std::move(inner)), seen_(std::move(seen)), counter_(counter) {}

   private:
    std::string do_predict(std::span<const double> features) const override {
      counter_.record(seen_.count(FeatureRow(features.begin(), features.end())) > 0);
      return inner_->predict(features);
    }
    std::shared_ptr<const ClassifierModel> inner_;
    std::set<FeatureRow> seen_;
    LeakCounter& counter_;
  };

  std::shared_ptr<const ClassifierLearner> inner_;
  LeakCounter& counter_;
};

class InstrumentedRegressorLearner final : public RegressorLearner {
 public:
  InstrumentedRegressorLearner(std::shared_ptr<const RegressorLearner> inner, LeakCounter& counter)
      : inner_(std::move(inner)), counter_(counter) {}
  const std::string& name() const noexcept override { return inner_->name(); }
  std::shared_ptr<const RegressorModel> fit(const RegressionSet& data) const override {
    return std::make_shared<Model>(inner_->fit(data), std::set<FeatureRow>(data.rows.begin(), data.rows.end()),
                                   counter_, data.rows.front().size());
  }

 private:
  class Model final : public RegressorModel {
   public:
    Model(std::shared_ptr<const RegressorModel> inner, std::set<FeatureRow> seen, LeakCounter& counter,
          std::size_t arity)
        : RegressorModel(arity), inner_(std::move(inner)), seen_(std::move(seen)), counter_(counter) {}

   private:
    double do_predict(std::span<const double> features) const override {
      counter_.record(seen_.count(FeatureRow(features.begin(), features.end())) > 0);
      return inner_->predict(features);
    }
    std::shared_ptr<const RegressorModel> inner_;
    std::set<FeatureRow> seen_;
    LeakCounter& counter_;
  };

  std::shared_ptr<const RegressorLearner> inner_;
  LeakCounter& counter_;
};

// ---------------------------------------------------------------------------
// Failure injection

/// Classifier learner whose fit always throws, standing in for a learner
/// that runs out of memory or time.
class FailingClassifierLearner final : public ClassifierLearner {
 public:
  explicit FailingClassifierLearner(std::string name) : name_(std::move(name)) {}
  const std::string& name() const noexcept override { return name_; }
  std::shared_ptr<const ClassifierModel> fit(const ClassificationSet&) const override {
    throw std::runtime_error("simulated out of memory");
  }

 private:
  std::string name_;
};

class FailingRegressorLearner final : public RegressorLearner {
 public:
  explicit FailingRegressorLearner(std::string name) : name_(std::move(name)) {}
  const std::string& name() const noexcept override { return name_; }
  std::shared_ptr<const RegressorModel> fit(const RegressionSet&) const override {
    throw std::runtime_error("simulated out of memory");
  }

 private:
  std::string name_;
};

// ---------------------------------------------------------------------------
// Independent oracles

/// Average ranks by explicit pairwise counting: rank = 1 + #smaller +
/// #equal-others / 2. Quadratic, shares no code with the library.
inline std::vector<double> oracle_ranks(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double less = 0, equal = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (j == i) continue;
      if (v[j] < v[i]) less += 1;
      if (v[j] == v[i]) equal += 1;
    }
    out[i] = 1.0 + less + equal / 2.0;
  }
  return out;
}

/// Textbook two-pass Pearson correlation; 0 when either side is constant.
inline double oracle_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0.0;
  return sxy / (std::sqrt(sxx) * std::sqrt(syy));
}

/// Random weak order over n items: values drawn from a small pool so ties
/// are common, then converted to average ranks by the oracle.
inline std::vector<double> random_weak_order(Rng& rng, std::size_t n) {
  std::vector<double> values(n);
  const std::size_t pool = 1 + rng.index(n);
  for (auto& v : values) v = static_cast<double>(rng.index(pool));
  return oracle_ranks(values);
}

}  // namespace rankfolio::support
