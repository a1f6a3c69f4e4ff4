#pragma once

#include "reimpute/gbt.hpp"
#include "reimpute/ridge.hpp"

#include <string_view>
#include <variant>

namespace reimpute {

/// Choice of regressor for chained equations and covariate adjustment.
/// Zero always predicts 0; it turns covariate adjustment into a no-op.
struct RegressorSpec {
  enum class Kind { Ridge, Gbt, Zero };

  Kind kind = Kind::Ridge;
  double ridge_lambda = 1.0;
  GbtParams gbt;

  static RegressorSpec ridge(double lambda = 1.0) { return {Kind::Ridge, lambda, {}}; }
  static RegressorSpec boosting(GbtParams p = {}) { return {Kind::Gbt, 1.0, p}; }
  static RegressorSpec zero() { return {Kind::Zero, 1.0, {}}; }
};

struct ZeroModel {};

class FittedRegressor {
 public:
  explicit FittedRegressor(std::variant<RidgeModel, GbtModel, ZeroModel> model)
      : model_(std::move(model)) {}

  Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
  const std::variant<RidgeModel, GbtModel, ZeroModel>& model() const { return model_; }

 private:
  std::variant<RidgeModel, GbtModel, ZeroModel> model_;
};

FittedRegressor fit_regressor(const RegressorSpec& spec, const Eigen::MatrixXd& X,
                              const Eigen::VectorXd& y);

std::string_view to_string(RegressorSpec::Kind kind);
RegressorSpec::Kind parse_regressor_kind(std::string_view name);

}  // namespace reimpute
