#include "reimpute/regressor.hpp"

#include <stdexcept>
#include <string>

namespace reimpute {

Eigen::VectorXd FittedRegressor::predict(const Eigen::MatrixXd& X) const {
  return std::visit(
      [&](const auto& m) -> Eigen::VectorXd {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, RidgeModel>) {
          return ridge_predict(m, X);
        } else if constexpr (std::is_same_v<M, GbtModel>) {
          return gbt_predict(m, X);
        } else {
          return Eigen::VectorXd::Zero(X.rows());
        }
      },
      model_);
}

FittedRegressor fit_regressor(const RegressorSpec& spec, const Eigen::MatrixXd& X,
                              const Eigen::VectorXd& y) {
  switch (spec.kind) {
    case RegressorSpec::Kind::Ridge:
      return FittedRegressor(ridge_fit(X, y, spec.ridge_lambda));
    case RegressorSpec::Kind::Gbt:
      return FittedRegressor(gbt_fit(X, y, spec.gbt));
    case RegressorSpec::Kind::Zero:
      return FittedRegressor(ZeroModel{});
  }
  throw std::invalid_argument("unknown regressor kind");
}

std::string_view to_string(RegressorSpec::Kind kind) {
  switch (kind) {
    case RegressorSpec::Kind::Ridge: return "ridge";
    case RegressorSpec::Kind::Gbt: return "gbt";
    case RegressorSpec::Kind::Zero: return "zero";
  }
  return "unknown";
}

RegressorSpec::Kind parse_regressor_kind(std::string_view name) {
  if (name == "ridge" || name == "linear") return RegressorSpec::Kind::Ridge;
  if (name == "gbt" || name == "boosting") return RegressorSpec::Kind::Gbt;
  if (name == "zero") return RegressorSpec::Kind::Zero;
  throw std::invalid_argument("unknown regressor '" + std::string(name) + "'");
}

}  // namespace reimpute
