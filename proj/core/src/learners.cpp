#include "rankfolio/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "rankfolio/error.hpp"

namespace rankfolio {

// ---------------------------------------------------------------------------
// FeatureScaler

FeatureScaler FeatureScaler::fit(std::span<const FeatureRow> rows) {
  if (rows.empty()) throw Error(ErrorCode::EmptyInput, "cannot fit a scaler on zero rows");
  const std::size_t d = rows.front().size();
  FeatureScaler scaler;
  scaler.means_.assign(d, 0.0);
  scaler.stddevs_.assign(d, 0.0);
  for (const auto& row : rows) {
    if (row.size() != d) {
      throw Error(ErrorCode::ArityMismatch, "training rows have differing lengths");
    }
  }
  for (std::size_t f = 0; f < d; ++f) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& row : rows) {
      if (!std::isnan(row[f])) {
        sum += row[f];
        ++count;
      }
    }
    if (count == 0) continue;  // all missing: mean 0, constant
    const double mean = sum / static_cast<double>(count);
    double ss = 0.0;
    for (const auto& row : rows) {
      if (!std::isnan(row[f])) ss += (row[f] - mean) * (row[f] - mean);
    }
    const double sd = std::sqrt(ss / static_cast<double>(count));
    scaler.means_[f] = mean;
    scaler.stddevs_[f] = sd > 1e-12 * std::max(1.0, std::abs(mean)) ? sd : 0.0;
  }
  return scaler;
}

FeatureRow FeatureScaler::apply(std::span<const double> row) const {
  if (row.size() != arity()) {
    throw Error(ErrorCode::ArityMismatch, "expected " + std::to_string(arity()) +
                                              " features, got " + std::to_string(row.size()));
  }
  FeatureRow out(row.size());
  for (std::size_t f = 0; f < row.size(); ++f) {
    if (std::isnan(row[f]) || stddevs_[f] == 0.0) {
      out[f] = 0.0;
    } else {
      out[f] = (row[f] - means_[f]) / stddevs_[f];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Specs and names

void LearnerSpec::validate() const {
  switch (kind) {
    case LearnerKind::Knn:
      if (k < 1) throw Error(ErrorCode::InvalidSpec, "knn needs k >= 1");
      break;
    case LearnerKind::Tree:
      if (max_depth < 0) throw Error(ErrorCode::InvalidSpec, "tree max depth must be >= 0");
      if (min_leaf < 1) throw Error(ErrorCode::InvalidSpec, "tree min leaf must be >= 1");
      break;
    case LearnerKind::Linear:
      if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw Error(ErrorCode::InvalidSpec, "ridge lambda must be finite and >= 0");
      }
      break;
    case LearnerKind::Baseline:
      break;
  }
}

std::optional<LearnerSpec> learner_spec_from_name(std::string_view name) {
  LearnerSpec spec;
  if (name == "knn1" || name == "knn3" || name == "knn5" || name == "knn10") {
    spec.kind = LearnerKind::Knn;
    spec.k = std::stoi(std::string(name.substr(3)));
  } else if (name == "tree") {
    spec.kind = LearnerKind::Tree;
  } else if (name == "linear") {
    spec.kind = LearnerKind::Linear;
  } else if (name == "baseline") {
    spec.kind = LearnerKind::Baseline;
  } else {
    return std::nullopt;
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Model base classes

namespace {

void check_arity(std::size_t expected, std::size_t got) {
  if (expected != got) {
    throw Error(ErrorCode::ArityMismatch, "model expects " + std::to_string(expected) +
                                              " features, got " + std::to_string(got));
  }
}

}  // namespace

std::string ClassifierModel::predict(std::span<const double> features) const {
  check_arity(arity_, features.size());
  return do_predict(features);
}

double RegressorModel::predict(std::span<const double> features) const {
  check_arity(arity_, features.size());
  return do_predict(features);
}

// ---------------------------------------------------------------------------
// Shared training-set preparation

namespace {

struct ScaledRows {
  FeatureScaler scaler;
  std::vector<FeatureRow> rows;
};

ScaledRows scale_training_rows(const std::vector<FeatureRow>& rows) {
  ScaledRows out{FeatureScaler::fit(rows), {}};
  out.rows.reserve(rows.size());
  for (const auto& row : rows) out.rows.push_back(out.scaler.apply(row));
  return out;
}

/// Labels mapped to dense ids in lexicographic order, so "smallest id" and
/// "lexicographically smallest label" coincide.
struct LabelCodes {
  std::vector<std::string> names;
  std::vector<int> codes;
};

LabelCodes encode_labels(const std::vector<std::string>& labels) {
  LabelCodes out;
  out.names = labels;
  std::sort(out.names.begin(), out.names.end());
  out.names.erase(std::unique(out.names.begin(), out.names.end()), out.names.end());
  out.codes.reserve(labels.size());
  for (const auto& label : labels) {
    const auto it = std::lower_bound(out.names.begin(), out.names.end(), label);
    out.codes.push_back(static_cast<int>(it - out.names.begin()));
  }
  return out;
}

int majority(std::span<const int> counts) {
  return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

void check_rows(std::size_t rows, std::size_t targets) {
  if (rows == 0) throw Error(ErrorCode::EmptyInput, "cannot fit a model on zero rows");
  if (rows != targets) {
    throw Error(ErrorCode::LengthMismatch, "row and target counts differ");
  }
}

// ---------------------------------------------------------------------------
// k nearest neighbours

class NeighbourIndex {
 public:
  NeighbourIndex(ScaledRows data, int k) : data_(std::move(data)), k_(static_cast<std::size_t>(k)) {}

  std::size_t arity() const { return data_.scaler.arity(); }

  /// Indices of the k nearest training rows ordered by (distance, index).
  std::vector<std::size_t> nearest(std::span<const double> query) const {
    const FeatureRow q = data_.scaler.apply(query);
    const std::size_t n = data_.rows.size();
    std::vector<std::pair<double, std::size_t>> dist(n);
    for (std::size_t r = 0; r < n; ++r) {
      double d2 = 0.0;
      const auto& row = data_.rows[r];
      for (std::size_t f = 0; f < q.size(); ++f) d2 += (row[f] - q[f]) * (row[f] - q[f]);
      dist[r] = {d2, r};
    }
    const std::size_t k = std::min(k_, n);
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    std::vector<std::size_t> out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = dist[i].second;
    return out;
  }

 private:
  ScaledRows data_;
  std::size_t k_;
};

class KnnClassifier final : public ClassifierModel {
 public:
  KnnClassifier(ScaledRows data, LabelCodes labels, int k)
      : ClassifierModel(data.scaler.arity()), index_(std::move(data), k), labels_(std::move(labels)) {}

 private:
  std::string do_predict(std::span<const double> features) const override {
    std::vector<int> votes(labels_.names.size(), 0);
    for (std::size_t r : index_.nearest(features)) ++votes[static_cast<std::size_t>(labels_.codes[r])];
    return labels_.names[static_cast<std::size_t>(majority(votes))];
  }

  NeighbourIndex index_;
  LabelCodes labels_;
};

class KnnRegressor final : public RegressorModel {
 public:
  KnnRegressor(ScaledRows data, std::vector<double> targets, int k)
      : RegressorModel(data.scaler.arity()), index_(std::move(data), k), targets_(std::move(targets)) {}

 private:
  double do_predict(std::span<const double> features) const override {
    const auto neighbours = index_.nearest(features);
    double sum = 0.0;
    for (std::size_t r : neighbours) sum += targets_[r];
    return sum / static_cast<double>(neighbours.size());
  }

  NeighbourIndex index_;
  std::vector<double> targets_;
};

// ---------------------------------------------------------------------------
// CART

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf output: label code or mean target
};

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double cost = 0.0;
};

/// Impurity bookkeeping for one side of a candidate split.
class GiniAccumulator {
 public:
  explicit GiniAccumulator(std::size_t classes) : counts_(classes, 0) {}
  void add(int code) {
    ++counts_[static_cast<std::size_t>(code)];
    ++n_;
  }
  void remove(int code) {
    --counts_[static_cast<std::size_t>(code)];
    --n_;
  }
  std::size_t size() const { return n_; }
  /// n * Gini impurity.
  double weighted_impurity() const {
    if (n_ == 0) return 0.0;
    double sum_sq = 0.0;
    for (long c : counts_) sum_sq += static_cast<double>(c) * static_cast<double>(c);
    return static_cast<double>(n_) - sum_sq / static_cast<double>(n_);
  }

 private:
  std::vector<long> counts_;
  std::size_t n_ = 0;
};

class SseAccumulator {
 public:
  void add(double y) {
    sum_ += y;
    sum_sq_ += y * y;
    ++n_;
  }
  void remove(double y) {
    sum_ -= y;
    sum_sq_ -= y * y;
    --n_;
  }
  std::size_t size() const { return n_; }
  double weighted_impurity() const {
    if (n_ == 0) return 0.0;
    return std::max(0.0, sum_sq_ - sum_ * sum_ / static_cast<double>(n_));
  }

 private:
  double sum_ = 0.0;
  double sum_sq_ = 0.0;
  std::size_t n_ = 0;
};

/// Greedy binary tree growth shared by the classification and regression
/// variants. `Target` is int (label code) or double; `make_acc` builds an
/// empty accumulator and `leaf_value` summarizes a node.
template <typename Target, typename MakeAcc, typename LeafValue>
class TreeGrower {
 public:
  TreeGrower(const std::vector<FeatureRow>& rows, const std::vector<Target>& targets,
             const LearnerSpec& spec, MakeAcc make_acc, LeafValue leaf_value)
      : rows_(rows), targets_(targets), spec_(spec), make_acc_(make_acc), leaf_value_(leaf_value) {}

  std::vector<TreeNode> grow() {
    std::vector<std::size_t> all(rows_.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    build(all, 0);
    return std::move(nodes_);
  }

 private:
  int build(std::vector<std::size_t>& idx, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(TreeNode{});
    nodes_[static_cast<std::size_t>(id)].value = leaf_value_(idx);

    const std::size_t min_leaf = static_cast<std::size_t>(spec_.min_leaf);
    if (depth >= spec_.max_depth || idx.size() < 2 * min_leaf) return id;

    auto parent = make_acc_();
    for (std::size_t r : idx) parent.add(targets_[r]);
    const double parent_cost = parent.weighted_impurity();
    if (parent_cost <= 1e-12) return id;

    const auto split = best_split(idx, parent_cost);
    if (split.feature < 0) return id;

    std::vector<std::size_t> left, right;
    for (std::size_t r : idx) {
      (rows_[r][static_cast<std::size_t>(split.feature)] <= split.threshold ? left : right).push_back(r);
    }
    idx.clear();
    idx.shrink_to_fit();
    const int l = build(left, depth + 1);
    const int rgt = build(right, depth + 1);
    auto& node = nodes_[static_cast<std::size_t>(id)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = l;
    node.right = rgt;
    return id;
  }

  Split best_split(const std::vector<std::size_t>& idx, double parent_cost) const {
    const std::size_t min_leaf = static_cast<std::size_t>(spec_.min_leaf);
    const std::size_t d = rows_.front().size();
    Split best;
    best.cost = parent_cost - 1e-12 * std::max(1.0, parent_cost);
    std::vector<std::size_t> order = idx;
    for (std::size_t f = 0; f < d; ++f) {
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return rows_[a][f] < rows_[b][f]; });
      auto left = make_acc_();
      auto right = make_acc_();
      for (std::size_t r : order) right.add(targets_[r]);
      for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        left.add(targets_[order[i]]);
        right.remove(targets_[order[i]]);
        const double here = rows_[order[i]][f];
        const double next = rows_[order[i + 1]][f];
        if (here == next || left.size() < min_leaf || right.size() < min_leaf) continue;
        const double cost = left.weighted_impurity() + right.weighted_impurity();
        if (cost < best.cost) {
          best.cost = cost;
          best.feature = static_cast<int>(f);
          best.threshold = here + (next - here) / 2.0;
        }
      }
    }
    return best;
  }

  const std::vector<FeatureRow>& rows_;
  const std::vector<Target>& targets_;
  const LearnerSpec& spec_;
  MakeAcc make_acc_;
  LeafValue leaf_value_;
  std::vector<TreeNode> nodes_;
};

double walk(const std::vector<TreeNode>& nodes, std::span<const double> x) {
  std::size_t at = 0;
  while (nodes[at].feature >= 0) {
    at = static_cast<std::size_t>(x[static_cast<std::size_t>(nodes[at].feature)] <= nodes[at].threshold
                                      ? nodes[at].left
                                      : nodes[at].right);
  }
  return nodes[at].value;
}

class TreeClassifier final : public ClassifierModel {
 public:
  TreeClassifier(FeatureScaler scaler, std::vector<TreeNode> nodes, std::vector<std::string> names)
      : ClassifierModel(scaler.arity()),
        scaler_(std::move(scaler)),
        nodes_(std::move(nodes)),
        names_(std::move(names)) {}

 private:
  std::string do_predict(std::span<const double> features) const override {
    const auto x = scaler_.apply(features);
    return names_[static_cast<std::size_t>(walk(nodes_, x))];
  }

  FeatureScaler scaler_;
  std::vector<TreeNode> nodes_;
  std::vector<std::string> names_;
};

class TreeRegressor final : public RegressorModel {
 public:
  TreeRegressor(FeatureScaler scaler, std::vector<TreeNode> nodes)
      : RegressorModel(scaler.arity()), scaler_(std::move(scaler)), nodes_(std::move(nodes)) {}

 private:
  double do_predict(std::span<const double> features) const override {
    return walk(nodes_, scaler_.apply(features));
  }

  FeatureScaler scaler_;
  std::vector<TreeNode> nodes_;
};

// ---------------------------------------------------------------------------
// Ridge regression

class LinearRegressor final : public RegressorModel {
 public:
  LinearRegressor(FeatureScaler scaler, std::vector<double> weights, double intercept)
      : RegressorModel(scaler.arity()),
        scaler_(std::move(scaler)),
        weights_(std::move(weights)),
        intercept_(intercept) {}

 private:
  double do_predict(std::span<const double> features) const override {
    const auto x = scaler_.apply(features);
    double y = intercept_;
    for (std::size_t f = 0; f < x.size(); ++f) y += weights_[f] * x[f];
    return y;
  }

  FeatureScaler scaler_;
  std::vector<double> weights_;
  double intercept_;
};

std::shared_ptr<const RegressorModel> fit_ridge(const LearnerSpec& spec, const RegressionSet& data) {
  auto scaled = scale_training_rows(data.rows);
  const auto n = static_cast<Eigen::Index>(scaled.rows.size());
  const auto d = static_cast<Eigen::Index>(scaled.scaler.arity());
  const double mean_y =
      std::accumulate(data.targets.begin(), data.targets.end(), 0.0) / static_cast<double>(n);

  Eigen::MatrixXd x(n, d);
  Eigen::VectorXd y(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index f = 0; f < d; ++f) x(r, f) = scaled.rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(f)];
    y(r) = data.targets[static_cast<std::size_t>(r)] - mean_y;
  }
  Eigen::MatrixXd gram = x.transpose() * x;
  gram.diagonal().array() += spec.lambda;
  const Eigen::VectorXd rhs = x.transpose() * y;

  Eigen::VectorXd w(d);
  if (spec.lambda > 0.0) {
    w = gram.ldlt().solve(rhs);
  } else {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(gram);
    if (qr.rank() < d) {
      throw Error(ErrorCode::SingularSystem,
                  "normal equations are singular with lambda = 0 (rank " +
                      std::to_string(qr.rank()) + " of " + std::to_string(d) + ")");
    }
    w = qr.solve(rhs);
  }
  return std::make_shared<LinearRegressor>(std::move(scaled.scaler),
                                           std::vector<double>(w.data(), w.data() + d), mean_y);
}

// ---------------------------------------------------------------------------
// Baselines

class ConstantClassifier final : public ClassifierModel {
 public:
  ConstantClassifier(std::size_t arity, std::string label)
      : ClassifierModel(arity), label_(std::move(label)) {}

 private:
  std::string do_predict(std::span<const double>) const override { return label_; }
  std::string label_;
};

class ConstantRegressor final : public RegressorModel {
 public:
  ConstantRegressor(std::size_t arity, double value) : RegressorModel(arity), value_(value) {}

 private:
  double do_predict(std::span<const double>) const override { return value_; }
  double value_;
};

std::size_t checked_arity(const std::vector<FeatureRow>& rows) {
  const std::size_t d = rows.front().size();
  for (const auto& row : rows) {
    if (row.size() != d) throw Error(ErrorCode::ArityMismatch, "training rows have differing lengths");
  }
  return d;
}

}  // namespace

std::shared_ptr<const ClassifierModel> fit_classifier(const LearnerSpec& spec,
                                                      const ClassificationSet& data) {
  spec.validate();
  check_rows(data.rows.size(), data.labels.size());
  const std::size_t arity = checked_arity(data.rows);
  auto labels = encode_labels(data.labels);

  switch (spec.kind) {
    case LearnerKind::Knn:
      return std::make_shared<KnnClassifier>(scale_training_rows(data.rows), std::move(labels), spec.k);
    case LearnerKind::Tree: {
      auto scaled = scale_training_rows(data.rows);
      const std::size_t classes = labels.names.size();
      auto make_acc = [classes] { return GiniAccumulator(classes); };
      auto leaf = [&](const std::vector<std::size_t>& idx) {
        std::vector<int> counts(classes, 0);
        for (std::size_t r : idx) ++counts[static_cast<std::size_t>(labels.codes[r])];
        return static_cast<double>(majority(counts));
      };
      TreeGrower<int, decltype(make_acc), decltype(leaf)> grower(scaled.rows, labels.codes, spec,
                                                                  make_acc, leaf);
      auto nodes = grower.grow();
      return std::make_shared<TreeClassifier>(std::move(scaled.scaler), std::move(nodes),
                                              std::move(labels.names));
    }
    case LearnerKind::Baseline: {
      std::vector<int> counts(labels.names.size(), 0);
      for (int c : labels.codes) ++counts[static_cast<std::size_t>(c)];
      return std::make_shared<ConstantClassifier>(arity, labels.names[static_cast<std::size_t>(majority(counts))]);
    }
    case LearnerKind::Linear:
      break;
  }
  throw Error(ErrorCode::InvalidSpec, "linear learners have no classifier variant");
}

std::shared_ptr<const RegressorModel> fit_regressor(const LearnerSpec& spec, const RegressionSet& data) {
  spec.validate();
  check_rows(data.rows.size(), data.targets.size());
  const std::size_t arity = checked_arity(data.rows);
  for (double t : data.targets) {
    if (!std::isfinite(t)) throw Error(ErrorCode::InvalidSpec, "regression targets must be finite");
  }

  switch (spec.kind) {
    case LearnerKind::Knn:
      return std::make_shared<KnnRegressor>(scale_training_rows(data.rows), data.targets, spec.k);
    case LearnerKind::Tree: {
      auto scaled = scale_training_rows(data.rows);
      auto make_acc = [] { return SseAccumulator(); };
      auto leaf = [&](const std::vector<std::size_t>& idx) {
        double sum = 0.0;
        for (std::size_t r : idx) sum += data.targets[r];
        return sum / static_cast<double>(idx.size());
      };
      TreeGrower<double, decltype(make_acc), decltype(leaf)> grower(scaled.rows, data.targets, spec,
                                                                     make_acc, leaf);
      auto nodes = grower.grow();
      return std::make_shared<TreeRegressor>(std::move(scaled.scaler), std::move(nodes));
    }
    case LearnerKind::Linear:
      return fit_ridge(spec, data);
    case LearnerKind::Baseline: {
      const double mean = std::accumulate(data.targets.begin(), data.targets.end(), 0.0) /
                          static_cast<double>(data.targets.size());
      return std::make_shared<ConstantRegressor>(arity, mean);
    }
  }
  throw Error(ErrorCode::InvalidSpec, "unknown learner kind");
}

// ---------------------------------------------------------------------------
// Learners and registry

namespace {

class NativeClassifierLearner final : public ClassifierLearner {
 public:
  NativeClassifierLearner(std::string name, LearnerSpec spec) : name_(std::move(name)), spec_(spec) {}
  const std::string& name() const noexcept override { return name_; }
  std::shared_ptr<const ClassifierModel> fit(const ClassificationSet& data) const override {
    return fit_classifier(spec_, data);
  }

 private:
  std::string name_;
  LearnerSpec spec_;
};

class NativeRegressorLearner final : public RegressorLearner {
 public:
  NativeRegressorLearner(std::string name, LearnerSpec spec) : name_(std::move(name)), spec_(spec) {}
  const std::string& name() const noexcept override { return name_; }
  std::shared_ptr<const RegressorModel> fit(const RegressionSet& data) const override {
    return fit_regressor(spec_, data);
  }

 private:
  std::string name_;
  LearnerSpec spec_;
};

}  // namespace

std::shared_ptr<const ClassifierLearner> make_classifier_learner(std::string name, LearnerSpec spec) {
  spec.validate();
  if (spec.kind == LearnerKind::Linear) {
    throw Error(ErrorCode::InvalidSpec, "linear learners have no classifier variant");
  }
  return std::make_shared<NativeClassifierLearner>(std::move(name), spec);
}

std::shared_ptr<const RegressorLearner> make_regressor_learner(std::string name, LearnerSpec spec) {
  spec.validate();
  return std::make_shared<NativeRegressorLearner>(std::move(name), spec);
}

LearnerRegistry LearnerRegistry::defaults() {
  LearnerRegistry registry;
  for (const char* name : {"knn1", "knn3", "knn5", "knn10", "tree", "linear", "baseline"}) {
    const auto spec = *learner_spec_from_name(name);
    if (spec.kind != LearnerKind::Linear) registry.add(make_classifier_learner(name, spec));
    registry.add(make_regressor_learner(name, spec));
  }
  return registry;
}

void LearnerRegistry::add(std::shared_ptr<const ClassifierLearner> learner) {
  const std::string name = learner->name();
  if (classifiers_.insert_or_assign(name, std::move(learner)).second) classifier_order_.push_back(name);
}

void LearnerRegistry::add(std::shared_ptr<const RegressorLearner> learner) {
  const std::string name = learner->name();
  if (regressors_.insert_or_assign(name, std::move(learner)).second) regressor_order_.push_back(name);
}

std::shared_ptr<const ClassifierLearner> LearnerRegistry::classifier(std::string_view name) const {
  const auto it = classifiers_.find(name);
  return it == classifiers_.end() ? nullptr : it->second;
}

std::shared_ptr<const RegressorLearner> LearnerRegistry::regressor(std::string_view name) const {
  const auto it = regressors_.find(name);
  return it == regressors_.end() ? nullptr : it->second;
}

std::vector<std::string> LearnerRegistry::classifier_names() const { return classifier_order_; }
std::vector<std::string> LearnerRegistry::regressor_names() const { return regressor_order_; }

}  // namespace rankfolio
