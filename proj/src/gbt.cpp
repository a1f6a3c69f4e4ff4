#include "reimpute/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace reimpute {

double RegressionTree::predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  int i = 0;
  while (!nodes[static_cast<std::size_t>(i)].is_leaf()) {
    const auto& n = nodes[static_cast<std::size_t>(i)];
    i = row(n.feature) < n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(i)].value;
}

int RegressionTree::depth() const {
  std::vector<int> d(nodes.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!nodes[i].is_leaf()) {
      d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
    }
    best = std::max(best, d[i]);
  }
  return best;
}

namespace {

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Eigen::MatrixXd& X, const Eigen::VectorXd& r, const GbtParams& p)
      : X_(X), r_(r), params_(p) {}

  RegressionTree build() {
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(X_.rows()));
    std::iota(rows.begin(), rows.end(), Eigen::Index{0});
    tree_.nodes.clear();
    grow(rows, 0);
    return std::move(tree_);
  }

 private:
  int grow(std::vector<Eigen::Index>& rows, int depth) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    double sum = 0.0;
    for (auto r : rows) sum += r_(r);
    const double n = static_cast<double>(rows.size());
    tree_.nodes.back().value = sum / n;
    tree_.nodes.back().samples = static_cast<int>(rows.size());

    const auto leaf = static_cast<std::size_t>(params_.min_samples_leaf);
    if (depth >= params_.max_depth || rows.size() < 2 * leaf) return id;

    SplitChoice best = find_split(rows, sum);
    if (best.feature < 0) return id;

    std::vector<Eigen::Index> left, right;
    for (auto r : rows) {
      (X_(r, best.feature) < best.threshold ? left : right).push_back(r);
    }
    const int l = grow(left, depth + 1);
    const int rr = grow(right, depth + 1);
    auto& node = tree_.nodes[static_cast<std::size_t>(id)];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = l;
    node.right = rr;
    return id;
  }

  SplitChoice find_split(std::vector<Eigen::Index>& rows, double total) const {
    const std::size_t n = rows.size();
    const auto leaf = static_cast<std::size_t>(params_.min_samples_leaf);
    double sq = 0.0;
    for (auto r : rows) sq += r_(r) * r_(r);
    const double sse_parent = sq - total * total / static_cast<double>(n);
    const double base = total * total / static_cast<double>(n);
    // Gains below this are rounding noise.
    const double floor_gain = 1e-12 * std::max(sse_parent, 0.0) + 1e-300;

    SplitChoice best;
    best.gain = floor_gain;
    std::vector<Eigen::Index> order(rows);
    for (int f = 0; f < static_cast<int>(X_.cols()); ++f) {
      std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return X_(a, f) < X_(b, f);
      });
      double left_sum = 0.0;
      for (std::size_t i = 1; i < n; ++i) {
        left_sum += r_(order[i - 1]);
        if (i < leaf || n - i < leaf) continue;
        const double lo = X_(order[i - 1], f);
        const double hi = X_(order[i], f);
        if (!(lo < hi)) continue;
        const double nl = static_cast<double>(i);
        const double nr = static_cast<double>(n - i);
        const double right_sum = total - left_sum;
        const double gain = left_sum * left_sum / nl + right_sum * right_sum / nr - base;
        if (gain > best.gain * (1.0 + 1e-12)) {
          double thr = lo + (hi - lo) / 2.0;
          if (!(thr > lo)) thr = hi;
          best = {f, thr, gain};
        }
      }
    }
    return best;
  }

  const Eigen::MatrixXd& X_;
  const Eigen::VectorXd& r_;
  const GbtParams& params_;
  RegressionTree tree_;
};

}  // namespace

GbtModel gbt_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                 const GbtParams& params) {
  if (X.rows() == 0) throw std::invalid_argument("gbt_fit: no training rows");
  if (y.size() != X.rows()) throw std::invalid_argument("gbt_fit: X and y differ in length");
  if (params.n_trees < 0 || params.max_depth < 1 || params.min_samples_leaf < 1 ||
      !(params.learning_rate > 0.0 && params.learning_rate <= 1.0)) {
    throw std::invalid_argument("gbt_fit: invalid parameters");
  }
  GbtModel model;
  model.learning_rate = params.learning_rate;
  model.n_features = static_cast<int>(X.cols());
  model.base_prediction = y.mean();

  Eigen::VectorXd pred = Eigen::VectorXd::Constant(y.size(), model.base_prediction);
  Eigen::VectorXd residual = y - pred;
  model.training_loss.push_back(residual.squaredNorm() / static_cast<double>(y.size()));
  model.trees.reserve(static_cast<std::size_t>(params.n_trees));
  for (int t = 0; t < params.n_trees; ++t) {
    RegressionTree tree = TreeBuilder(X, residual, params).build();
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      pred(i) += params.learning_rate * tree.predict(X.row(i));
    }
    residual = y - pred;
    model.training_loss.push_back(residual.squaredNorm() / static_cast<double>(y.size()));
    model.trees.push_back(std::move(tree));
  }
  return model;
}

Eigen::VectorXd gbt_predict(const GbtModel& model, const Eigen::MatrixXd& X) {
  if (X.cols() != model.n_features) {
    throw std::invalid_argument("gbt_predict: feature count mismatch");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Constant(X.rows(), model.base_prediction);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    double acc = 0.0;
    for (const auto& tree : model.trees) acc += tree.predict(X.row(i));
    out(i) += model.learning_rate * acc;
  }
  return out;
}

}  // namespace reimpute
