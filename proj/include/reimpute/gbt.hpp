#pragma once

#include <Eigen/Dense>

#include <vector>

namespace reimpute {

struct GbtParams {
  int n_trees = 100;
  double learning_rate = 0.1;
  int max_depth = 3;
  int min_samples_leaf = 5;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // rows with x[feature] < threshold go left
  int left = -1;
  int right = -1;
  double value = 0.0;
  int samples = 0;

  bool is_leaf() const noexcept { return feature < 0; }
};

/// Depth-limited regression tree stored as a flat node array (root at 0).
struct RegressionTree {
  std::vector<TreeNode> nodes;

  double predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
  int depth() const;
};

/// Squared-error gradient boosting: prediction is
/// base_prediction + learning_rate * sum of tree outputs.
struct GbtModel {
  double base_prediction = 0.0;
  double learning_rate = 0.1;
  int n_features = 0;
  std::vector<RegressionTree> trees;
  /// Mean squared training error after 0, 1, ..., n_trees rounds.
  std::vector<double> training_loss;
};

/// Each round fits a tree to the current residuals. Splits are searched
/// exhaustively over midpoints of sorted unique feature values; ties go to
/// the lowest feature index, then the lowest threshold. Deterministic.
GbtModel gbt_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                 const GbtParams& params = {});

Eigen::VectorXd gbt_predict(const GbtModel& model, const Eigen::MatrixXd& X);

}  // namespace reimpute
