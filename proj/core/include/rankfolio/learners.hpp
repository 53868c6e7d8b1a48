#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rankfolio {

using FeatureRow = std::vector<double>;

struct ClassificationSet {
  std::vector<FeatureRow> rows;
  std::vector<std::string> labels;
};

struct RegressionSet {
  std::vector<FeatureRow> rows;
  std::vector<double> targets;
};

/// Z-scoring with mean imputation. Statistics ignore missing (NaN) values;
/// population standard deviation; constant features map to 0.
class FeatureScaler {
 public:
  FeatureScaler() = default;

  /// Throws EmptyInput for no rows, ArityMismatch for ragged rows.
  static FeatureScaler fit(std::span<const FeatureRow> rows);

  std::size_t arity() const noexcept { return means_.size(); }
  const std::vector<double>& means() const noexcept { return means_; }
  const std::vector<double>& stddevs() const noexcept { return stddevs_; }

  /// Imputes missing values with the training mean, then standardizes.
  /// Throws ArityMismatch.
  FeatureRow apply(std::span<const double> row) const;

 private:
  std::vector<double> means_;
  std::vector<double> stddevs_;  // 0 marks a constant feature
};

inline FeatureScaler standardize_fit(std::span<const FeatureRow> rows) {
  return FeatureScaler::fit(rows);
}

enum class LearnerKind { Knn, Tree, Linear, Baseline };

struct LearnerSpec {
  LearnerKind kind = LearnerKind::Baseline;
  int k = 5;            // knn: neighbours
  int max_depth = 8;    // tree
  int min_leaf = 5;     // tree
  double lambda = 1e-6; // linear: ridge penalty

  /// Throws InvalidSpec when a parameter is out of range.
  void validate() const;
};

/// Registry names: knn1, knn3, knn5, knn10, tree, linear, baseline.
std::optional<LearnerSpec> learner_spec_from_name(std::string_view name);

/// Fitted classifier. Immutable; predict is pure and thread-safe.
class ClassifierModel {
 public:
  virtual ~ClassifierModel() = default;

  std::size_t arity() const noexcept { return arity_; }

  /// Throws ArityMismatch.
  std::string predict(std::span<const double> features) const;

 protected:
  explicit ClassifierModel(std::size_t arity) : arity_(arity) {}

 private:
  virtual std::string do_predict(std::span<const double> features) const = 0;

  std::size_t arity_;
};

/// Fitted regressor. Immutable; predict is pure and thread-safe.
class RegressorModel {
 public:
  virtual ~RegressorModel() = default;

  std::size_t arity() const noexcept { return arity_; }

  /// Throws ArityMismatch.
  double predict(std::span<const double> features) const;

 protected:
  explicit RegressorModel(std::size_t arity) : arity_(arity) {}

 private:
  virtual double do_predict(std::span<const double> features) const = 0;

  std::size_t arity_;
};

/// knn: stores the scaled training set; distance ties go to the lower
/// training row, vote ties to the lexicographically smaller label.
/// tree: CART on Gini impurity. baseline: majority label.
/// Throws InvalidSpec (including kind = linear), EmptyInput.
std::shared_ptr<const ClassifierModel> fit_classifier(const LearnerSpec& spec,
                                                      const ClassificationSet& data);

/// knn: mean of the k nearest targets. tree: CART on variance reduction.
/// linear: ridge least squares on standardized features with an unpenalized
/// intercept. baseline: global mean.
/// Throws InvalidSpec, EmptyInput, SingularSystem (lambda = 0 only).
std::shared_ptr<const RegressorModel> fit_regressor(const LearnerSpec& spec,
                                                    const RegressionSet& data);

inline std::string predict_label(const ClassifierModel& model, std::span<const double> features) {
  return model.predict(features);
}

inline double predict_value(const RegressorModel& model, std::span<const double> features) {
  return model.predict(features);
}

/// A named way of fitting classifiers. Rankers only see this interface, so
/// tests can substitute stubs.
class ClassifierLearner {
 public:
  virtual ~ClassifierLearner() = default;
  virtual const std::string& name() const noexcept = 0;
  virtual std::shared_ptr<const ClassifierModel> fit(const ClassificationSet& data) const = 0;
};

class RegressorLearner {
 public:
  virtual ~RegressorLearner() = default;
  virtual const std::string& name() const noexcept = 0;
  virtual std::shared_ptr<const RegressorModel> fit(const RegressionSet& data) const = 0;
};

std::shared_ptr<const ClassifierLearner> make_classifier_learner(std::string name, LearnerSpec spec);
std::shared_ptr<const RegressorLearner> make_regressor_learner(std::string name, LearnerSpec spec);

/// Name -> learner lookup used by the CLI and the experiment grid.
class LearnerRegistry {
 public:
  /// knn1, knn3, knn5, knn10, tree and baseline for both roles; linear as a
  /// regressor only.
  static LearnerRegistry defaults();

  void add(std::shared_ptr<const ClassifierLearner> learner);
  void add(std::shared_ptr<const RegressorLearner> learner);

  /// nullptr when the name has no learner in that role.
  std::shared_ptr<const ClassifierLearner> classifier(std::string_view name) const;
  std::shared_ptr<const RegressorLearner> regressor(std::string_view name) const;

  std::vector<std::string> classifier_names() const;
  std::vector<std::string> regressor_names() const;

 private:
  std::map<std::string, std::shared_ptr<const ClassifierLearner>, std::less<>> classifiers_;
  std::map<std::string, std::shared_ptr<const RegressorLearner>, std::less<>> regressors_;
  std::vector<std::string> classifier_order_;
  std::vector<std::string> regressor_order_;
};

}  // namespace rankfolio
