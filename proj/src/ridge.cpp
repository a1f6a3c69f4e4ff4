#include "reimpute/ridge.hpp"

#include "reimpute/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace reimpute {

Eigen::VectorXd RidgeModel::coefficients() const {
  Eigen::VectorXd out(slopes.size() + 1);
  out(0) = intercept;
  out.tail(slopes.size()) = slopes;
  return out;
}

RidgeModel ridge_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     double lambda) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  if (n == 0) throw FitError("ridge_fit: no training rows");
  if (y.size() != n) throw std::invalid_argument("ridge_fit: X and y differ in length");
  if (!(lambda >= 0.0)) throw std::invalid_argument("ridge_fit: lambda must be >= 0");

  RidgeModel model;
  model.lambda = lambda;
  const double y_mean = y.mean();
  if (p == 0) {
    model.intercept = y_mean;
    model.slopes = Eigen::VectorXd(0);
    return model;
  }

  const Eigen::RowVectorXd x_mean = X.colwise().mean();
  Eigen::MatrixXd Xs = X.rowwise() - x_mean;
  Eigen::RowVectorXd scale =
      (Xs.colwise().squaredNorm() / static_cast<double>(n)).cwiseSqrt();
  for (Eigen::Index j = 0; j < p; ++j) {
    if (!(scale(j) > 1e-12 * (1.0 + std::abs(x_mean(j))))) {
      scale(j) = 1.0;
      Xs.col(j).setZero();
    }
  }
  Xs.array().rowwise() /= scale.array();
  const Eigen::VectorXd yc = y.array() - y_mean;

  Eigen::MatrixXd gram = Xs.transpose() * Xs;
  gram.diagonal().array() += lambda;
  const Eigen::VectorXd rhs = Xs.transpose() * yc;

  Eigen::VectorXd b;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  const double tol = 1e-10 * std::max(1.0, gram.diagonal().maxCoeff());
  const bool ldlt_ok = ldlt.info() == Eigen::Success && ldlt.isPositive() &&
                       ldlt.vectorD().minCoeff() > tol;
  if (ldlt_ok) {
    b = ldlt.solve(rhs);
  } else {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(Xs);
    if (lambda == 0.0) {
      b = cod.solve(yc);
    } else {
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> g(gram);
      b = g.solve(rhs);
    }
    model.rank_deficient = lambda == 0.0 && cod.rank() < p;
  }

  model.slopes = (b.array() / scale.transpose().array()).matrix();
  model.intercept = y_mean - x_mean.dot(model.slopes);
  return model;
}

Eigen::VectorXd ridge_predict(const RidgeModel& model, const Eigen::MatrixXd& X) {
  if (X.cols() != model.slopes.size()) {
    throw std::invalid_argument("ridge_predict: feature count mismatch");
  }
  Eigen::VectorXd out = X * model.slopes;
  out.array() += model.intercept;
  return out;
}

}  // namespace reimpute
