#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "perfpred/features.hpp"

namespace perfpred {

struct TrainParams {
  double learning_rate = 0.1;
  int max_depth = 10;
  int n_estimators = 100;
  int min_samples_leaf = 1;
  double min_gain = 0.0;
  std::uint64_t seed = 0;  // carried for provenance; training is deterministic
};

// Leaf nodes have feature == -1. Internal nodes route value < threshold to
// the left child. Children are arena indices in preorder.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
  double value = 0.0;  // leaf output
  int left = -1;
  int right = -1;

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;  // preorder; root at index 0

  double predict_row(const Eigen::MatrixXd& X, Eigen::Index row) const;
  double predict_point(const Eigen::VectorXd& x) const;
};

struct GBRTModel {
  TrainParams params;
  double base_score = 0.0;
  std::vector<std::string> feature_names;
  std::vector<Tree> trees;
  Eigen::VectorXd gain_totals;

  // Squared training error before any tree and after each tree; size
  // n_estimators + 1. Not serialized.
  std::vector<double> train_sse;
};

// Greedy exact CART step: candidate thresholds are midpoints between
// consecutive distinct sorted feature values; the split maximizing
// SSE(parent) - SSE(left) - SSE(right) wins, ties broken by lower feature
// index then lower threshold. Leaves hold the mean residual.
Tree fit_regression_tree(const Eigen::MatrixXd& X, const Eigen::VectorXd& residuals,
                         const TrainParams& params);

// Squared-error boosting from the mean of y. Deterministic: identical
// inputs give a bit-identical model.
GBRTModel train_gbrt(const FeatureMatrix& X, const Eigen::VectorXd& y,
                     const TrainParams& params);

double predict(const GBRTModel& model, const FeatureVector& x);
Eigen::VectorXd predict_matrix(const GBRTModel& model, const FeatureMatrix& X);

// Accumulated split gain per feature, normalized to sum to 1; uniform when
// no split exists anywhere.
std::map<std::string, double> feature_importance(const GBRTModel& model);

nlohmann::json model_to_json(const GBRTModel& model);
GBRTModel model_from_json(const nlohmann::json& doc);
void save_model(const GBRTModel& model, const std::string& path);
GBRTModel load_model(const std::string& path);

}  // namespace perfpred
