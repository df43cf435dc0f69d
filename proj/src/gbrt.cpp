#include "perfpred/gbrt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "perfpred/csv.hpp"

namespace perfpred {

using nlohmann::json;

double Tree::predict_row(const Eigen::MatrixXd& X, Eigen::Index row) const {
  int idx = 0;
  while (!nodes[static_cast<std::size_t>(idx)].is_leaf()) {
    const TreeNode& n = nodes[static_cast<std::size_t>(idx)];
    idx = X(row, n.feature) < n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(idx)].value;
}

double Tree::predict_point(const Eigen::VectorXd& x) const {
  int idx = 0;
  while (!nodes[static_cast<std::size_t>(idx)].is_leaf()) {
    const TreeNode& n = nodes[static_cast<std::size_t>(idx)];
    idx = x[n.feature] < n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(idx)].value;
}

namespace {

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double gain = -std::numeric_limits<double>::infinity();
};

// Sums are accumulated in ascending row order for leaves and in sorted
// feature order for the prefix scan, so repeated runs are bit-identical.
class TreeBuilder {
 public:
  TreeBuilder(const Eigen::MatrixXd& X, const Eigen::VectorXd& r, const TrainParams& p)
      : X_(X), r_(r), params_(p) {}

  Tree build() {
    std::vector<int> rows(static_cast<std::size_t>(X_.rows()));
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<int>(i);
    Tree tree;
    grow(tree, rows, 0);
    return tree;
  }

 private:
  int grow(Tree& tree, const std::vector<int>& rows, int depth) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    double sum = 0.0;
    for (int i : rows) sum += r_[i];
    const double mean = sum / static_cast<double>(n);

    const int my_index = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    auto as_leaf = [&]() {
      tree.nodes[static_cast<std::size_t>(my_index)].value = mean;
      return my_index;
    };

    if (depth >= params_.max_depth) return as_leaf();
    if (n < 2 * static_cast<Eigen::Index>(params_.min_samples_leaf)) return as_leaf();

    double min_r = r_[rows[0]], max_r = r_[rows[0]];
    for (int i : rows) {
      min_r = std::min(min_r, r_[i]);
      max_r = std::max(max_r, r_[i]);
    }
    if (min_r == max_r) return as_leaf();  // zero residual variance

    double sum_sq = 0.0;
    for (int i : rows) sum_sq += r_[i] * r_[i];
    const double parent_sse = sum_sq - sum * sum / static_cast<double>(n);

    const SplitChoice best = best_split(rows, sum, sum_sq, parent_sse);
    if (!(best.gain > params_.min_gain)) return as_leaf();

    std::vector<int> left, right;
    left.reserve(rows.size());
    right.reserve(rows.size());
    for (int i : rows) {
      if (X_(i, best.feature) < best.threshold) left.push_back(i);
      else right.push_back(i);
    }

    TreeNode& node = tree.nodes[static_cast<std::size_t>(my_index)];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.gain = best.gain;
    const int left_index = grow(tree, left, depth + 1);
    const int right_index = grow(tree, right, depth + 1);
    tree.nodes[static_cast<std::size_t>(my_index)].left = left_index;
    tree.nodes[static_cast<std::size_t>(my_index)].right = right_index;
    return my_index;
  }

  SplitChoice best_split(const std::vector<int>& rows, double sum, double sum_sq,
                         double parent_sse) const {
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto msl = static_cast<Eigen::Index>(params_.min_samples_leaf);
    SplitChoice best;
    std::vector<std::pair<double, int>> sorted(rows.size());
    for (Eigen::Index f = 0; f < X_.cols(); ++f) {
      for (std::size_t i = 0; i < rows.size(); ++i)
        sorted[i] = {X_(rows[i], f), rows[i]};
      std::sort(sorted.begin(), sorted.end());

      double lsum = 0.0, lsum_sq = 0.0;
      for (Eigen::Index k = 0; k + 1 < n; ++k) {
        const double v = r_[sorted[static_cast<std::size_t>(k)].second];
        lsum += v;
        lsum_sq += v * v;
        const double x_lo = sorted[static_cast<std::size_t>(k)].first;
        const double x_hi = sorted[static_cast<std::size_t>(k) + 1].first;
        if (x_lo == x_hi) continue;
        const Eigen::Index nl = k + 1;
        const Eigen::Index nr = n - nl;
        if (nl < msl || nr < msl) continue;
        const double rsum = sum - lsum;
        const double rsum_sq = sum_sq - lsum_sq;
        const double left_sse = lsum_sq - lsum * lsum / static_cast<double>(nl);
        const double right_sse = rsum_sq - rsum * rsum / static_cast<double>(nr);
        const double gain = parent_sse - left_sse - right_sse;
        // Strict > plus ascending (feature, threshold) scan order implements
        // the tie-break toward the lower feature index and lower threshold.
        if (gain > best.gain) {
          best.feature = static_cast<int>(f);
          best.threshold = 0.5 * (x_lo + x_hi);
          best.gain = gain;
        }
      }
    }
    return best;
  }

  const Eigen::MatrixXd& X_;
  const Eigen::VectorXd& r_;
  const TrainParams& params_;
};

void check_params(const TrainParams& p) {
  if (!(p.learning_rate > 0.0)) throw ValidationError("learning_rate must be > 0");
  if (p.max_depth < 1) throw ValidationError("max_depth must be >= 1");
  if (p.n_estimators < 1) throw ValidationError("n_estimators must be >= 1");
  if (p.min_samples_leaf < 1) throw ValidationError("min_samples_leaf must be >= 1");
}

}  // namespace

Tree fit_regression_tree(const Eigen::MatrixXd& X, const Eigen::VectorXd& residuals,
                         const TrainParams& params) {
  check_params(params);
  if (X.rows() < 1) throw ValidationError("cannot fit a tree on zero rows");
  if (X.rows() != residuals.size())
    throw ValidationError("row count does not match residual count");
  for (Eigen::Index i = 0; i < residuals.size(); ++i)
    if (!std::isfinite(residuals[i])) throw ValidationError("non-finite residual");
  return TreeBuilder(X, residuals, params).build();
}

GBRTModel train_gbrt(const FeatureMatrix& X, const Eigen::VectorXd& y,
                     const TrainParams& params) {
  check_params(params);
  const Eigen::Index n = X.rows();
  if (n < 1) throw ValidationError("cannot train on zero rows");
  if (y.size() != n) throw ValidationError("feature rows and target count differ");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(y[i])) throw ValidationError("non-finite target value");
    for (Eigen::Index j = 0; j < X.cols(); ++j)
      if (!std::isfinite(X.values(i, j))) throw ValidationError("non-finite feature value");
  }

  GBRTModel model;
  model.params = params;
  model.feature_names = X.names;
  model.gain_totals = Eigen::VectorXd::Zero(X.cols());

  double ysum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) ysum += y[i];
  model.base_score = ysum / static_cast<double>(n);

  Eigen::VectorXd preds = Eigen::VectorXd::Constant(n, model.base_score);
  Eigen::VectorXd residuals(n);

  auto sse_of = [&]() {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = y[i] - preds[i];
      s += d * d;
    }
    return s;
  };
  model.train_sse.reserve(static_cast<std::size_t>(params.n_estimators) + 1);
  model.train_sse.push_back(sse_of());

  for (int m = 0; m < params.n_estimators; ++m) {
    for (Eigen::Index i = 0; i < n; ++i) residuals[i] = y[i] - preds[i];
    Tree tree = TreeBuilder(X.values, residuals, params).build();
    for (Eigen::Index i = 0; i < n; ++i)
      preds[i] += params.learning_rate * tree.predict_row(X.values, i);
    for (const TreeNode& node : tree.nodes)
      if (!node.is_leaf()) model.gain_totals[node.feature] += node.gain;
    model.train_sse.push_back(sse_of());
    model.trees.push_back(std::move(tree));
  }
  return model;
}

namespace {

void check_feature_names(const GBRTModel& model, const std::vector<std::string>& names) {
  if (model.feature_names != names)
    throw ValidationError("feature names do not match the trained model");
}

}  // namespace

double predict(const GBRTModel& model, const FeatureVector& x) {
  check_feature_names(model, x.names);
  double acc = 0.0;
  for (const Tree& t : model.trees) acc += t.predict_point(x.values);
  return model.base_score + model.params.learning_rate * acc;
}

Eigen::VectorXd predict_matrix(const GBRTModel& model, const FeatureMatrix& X) {
  check_feature_names(model, X.names);
  Eigen::VectorXd out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    double acc = 0.0;
    for (const Tree& t : model.trees) acc += t.predict_row(X.values, i);
    out[i] = model.base_score + model.params.learning_rate * acc;
  }
  return out;
}

std::map<std::string, double> feature_importance(const GBRTModel& model) {
  std::map<std::string, double> out;
  double total = 0.0;
  for (Eigen::Index j = 0; j < model.gain_totals.size(); ++j)
    total += model.gain_totals[j];
  const auto f = static_cast<double>(model.gain_totals.size());
  for (Eigen::Index j = 0; j < model.gain_totals.size(); ++j) {
    const double share = total > 0.0 ? model.gain_totals[j] / total : 1.0 / f;
    out[model.feature_names[static_cast<std::size_t>(j)]] = share;
  }
  return out;
}

namespace {

json node_to_json(const Tree& tree, int index) {
  const TreeNode& n = tree.nodes[static_cast<std::size_t>(index)];
  if (n.is_leaf()) return json{{"value", n.value}};
  return json{{"feature_index", n.feature},
              {"threshold", n.threshold},
              {"gain", n.gain},
              {"left", node_to_json(tree, n.left)},
              {"right", node_to_json(tree, n.right)}};
}

int node_from_json(const json& doc, Tree& tree) {
  const int my_index = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  if (doc.contains("value")) {
    if (!doc["value"].is_number())
      throw ValidationError("model json: leaf 'value' must be a number");
    tree.nodes[static_cast<std::size_t>(my_index)].value = doc["value"].get<double>();
    return my_index;
  }
  for (const char* key : {"feature_index", "threshold", "gain", "left", "right"})
    if (!doc.contains(key))
      throw ValidationError(std::string("model json: internal node missing '") + key + "'");
  TreeNode& n = tree.nodes[static_cast<std::size_t>(my_index)];
  n.feature = doc["feature_index"].get<int>();
  n.threshold = doc["threshold"].get<double>();
  n.gain = doc["gain"].get<double>();
  if (n.feature < 0) throw ValidationError("model json: negative feature_index");
  const int left_index = node_from_json(doc["left"], tree);
  const int right_index = node_from_json(doc["right"], tree);
  tree.nodes[static_cast<std::size_t>(my_index)].left = left_index;
  tree.nodes[static_cast<std::size_t>(my_index)].right = right_index;
  return my_index;
}

}  // namespace

json model_to_json(const GBRTModel& model) {
  json doc;
  doc["params"] = {{"learning_rate", model.params.learning_rate},
                   {"max_depth", model.params.max_depth},
                   {"n_estimators", model.params.n_estimators},
                   {"min_samples_leaf", model.params.min_samples_leaf},
                   {"min_gain", model.params.min_gain},
                   {"seed", model.params.seed}};
  doc["base_score"] = model.base_score;
  doc["feature_names"] = model.feature_names;
  doc["trees"] = json::array();
  for (const Tree& t : model.trees) doc["trees"].push_back(node_to_json(t, 0));
  doc["gain_totals"] = json::array();
  for (Eigen::Index j = 0; j < model.gain_totals.size(); ++j)
    doc["gain_totals"].push_back(model.gain_totals[j]);
  return doc;
}

GBRTModel model_from_json(const json& doc) {
  for (const char* key : {"params", "base_score", "feature_names", "trees", "gain_totals"})
    if (!doc.contains(key))
      throw ValidationError(std::string("model json: missing '") + key + "'");
  GBRTModel model;
  const json& p = doc["params"];
  model.params.learning_rate = p.at("learning_rate").get<double>();
  model.params.max_depth = p.at("max_depth").get<int>();
  model.params.n_estimators = p.at("n_estimators").get<int>();
  model.params.min_samples_leaf = p.at("min_samples_leaf").get<int>();
  model.params.min_gain = p.at("min_gain").get<double>();
  model.params.seed = p.at("seed").get<std::uint64_t>();
  model.base_score = doc["base_score"].get<double>();
  model.feature_names = doc["feature_names"].get<std::vector<std::string>>();
  for (const json& t : doc["trees"]) {
    Tree tree;
    node_from_json(t, tree);
    for (const TreeNode& n : tree.nodes)
      if (!n.is_leaf() &&
          n.feature >= static_cast<int>(model.feature_names.size()))
        throw ValidationError("model json: feature_index out of range");
    model.trees.push_back(std::move(tree));
  }
  const auto& gains = doc["gain_totals"];
  if (gains.size() != model.feature_names.size())
    throw ValidationError("model json: gain_totals size does not match feature_names");
  model.gain_totals.resize(static_cast<Eigen::Index>(gains.size()));
  for (std::size_t j = 0; j < gains.size(); ++j)
    model.gain_totals[static_cast<Eigen::Index>(j)] = gains[j].get<double>();
  return model;
}

void save_model(const GBRTModel& model, const std::string& path) {
  write_file(path, model_to_json(model).dump(2) + "\n");
}

GBRTModel load_model(const std::string& path) {
  try {
    return model_from_json(json::parse(read_file(path)));
  } catch (const json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

}  // namespace perfpred
