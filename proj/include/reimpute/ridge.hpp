#pragma once

#include <Eigen/Dense>

namespace reimpute {

/// Linear model y ~ intercept + X * slopes, fitted with an L2 penalty on the
/// standardized slopes. The intercept is never penalized.
struct RidgeModel {
  double intercept = 0.0;
  Eigen::VectorXd slopes;  // original (unstandardized) feature scale
  double lambda = 0.0;
  bool rank_deficient = false;  // lambda == 0 and the system was singular

  /// Intercept first, then slopes.
  Eigen::VectorXd coefficients() const;
};

/// Centers and scales each feature (population standard deviation; constant
/// columns keep scale 1), then solves (Xs'Xs + lambda I) b = Xs'(y - mean y).
/// With lambda == 0 a singular system falls back to the least-norm solution.
RidgeModel ridge_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     double lambda);

Eigen::VectorXd ridge_predict(const RidgeModel& model, const Eigen::MatrixXd& X);

}  // namespace reimpute
