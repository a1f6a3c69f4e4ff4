#include "reimpute/ridge.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace reimpute;

namespace {

using Mat = std::vector<std::vector<double>>;

// Gaussian elimination with partial pivoting on a dense copy.
std::vector<double> gauss_solve(Mat a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

// Reference ridge: standardize with population SD in plain loops, solve the
// penalized normal equations by elimination, map back.
std::vector<double> reference_ridge(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda) {
  const auto n = static_cast<std::size_t>(X.rows()), p = static_cast<std::size_t>(X.cols());
  std::vector<double> mean(p, 0), sd(p, 0);
  double ym = 0;
  for (std::size_t i = 0; i < n; ++i) ym += y(static_cast<Eigen::Index>(i)) / static_cast<double>(n);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = 0; i < n; ++i) mean[j] += X(i, j) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) sd[j] += (X(i, j) - mean[j]) * (X(i, j) - mean[j]);
    sd[j] = std::sqrt(sd[j] / static_cast<double>(n));
  }
  Mat a(p, std::vector<double>(p, 0));
  std::vector<double> b(p, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      const double xj = (X(i, j) - mean[j]) / sd[j];
      b[j] += xj * (y(static_cast<Eigen::Index>(i)) - ym);
      for (std::size_t k = 0; k < p; ++k) a[j][k] += xj * (X(i, k) - mean[k]) / sd[k];
    }
  }
  for (std::size_t j = 0; j < p; ++j) a[j][j] += lambda;
  const auto beta = gauss_solve(a, b);
  std::vector<double> out(p + 1);
  out[0] = ym;
  for (std::size_t j = 0; j < p; ++j) {
    out[j + 1] = beta[j] / sd[j];
    out[0] -= mean[j] * out[j + 1];
  }
  return out;
}

}  // namespace

TEST(Ridge, MatchesEliminationOracle) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  for (double lambda : {0.0, 0.5, 1.0, 25.0}) {
    Eigen::MatrixXd X(30, 4);
    Eigen::VectorXd y(30);
    for (int i = 0; i < 30; ++i) {
      for (int j = 0; j < 4; ++j) X(i, j) = nd(rng) * (j + 1) + j;
      y(i) = 2 * X(i, 0) - X(i, 2) + nd(rng);
    }
    const RidgeModel m = ridge_fit(X, y, lambda);
    const auto ref = reference_ridge(X, y, lambda);
    const Eigen::VectorXd c = m.coefficients();
    for (int j = 0; j < 5; ++j) EXPECT_NEAR(c(j), ref[static_cast<std::size_t>(j)], 1e-9) << "lambda " << lambda;
    EXPECT_FALSE(m.rank_deficient);
  }
}

TEST(Ridge, ExactLinearDataRecoveredWithoutPenalty) {
  Eigen::MatrixXd X(6, 2);
  X << 1, 0, 2, 1, 3, 5, 4, 2, 5, 3, 6, 1;
  const Eigen::VectorXd y = (3.0 + 2.0 * X.col(0).array() - 0.5 * X.col(1).array()).matrix();
  const RidgeModel m = ridge_fit(X, y, 0.0);
  EXPECT_NEAR(m.intercept, 3.0, 1e-10);
  EXPECT_NEAR(m.slopes(0), 2.0, 1e-10);
  EXPECT_NEAR(m.slopes(1), -0.5, 1e-10);
  EXPECT_LT((ridge_predict(m, X) - y).norm(), 1e-9);
}

TEST(Ridge, SingularSystemFallsBackToLeastNorm) {
  Eigen::MatrixXd X(5, 2);
  X << 1, 2, 2, 4, 3, 6, 4, 8, 5, 10;
  const Eigen::VectorXd y = X.col(0) * 3.0;
  const RidgeModel m = ridge_fit(X, y, 0.0);
  EXPECT_TRUE(m.rank_deficient);
  EXPECT_LT((ridge_predict(m, X) - y).norm(), 1e-8);
  // Least norm in standardized space splits the weight evenly.
  EXPECT_NEAR(m.slopes(0) * 1.0, m.slopes(1) * 2.0, 1e-8);
}

TEST(Ridge, ConstantColumnsAndNoFeatures) {
  Eigen::MatrixXd X(4, 1);
  X << 7, 7, 7, 7;
  Eigen::VectorXd y(4);
  y << 1, 2, 3, 4;
  const RidgeModel m = ridge_fit(X, y, 1.0);
  EXPECT_NEAR(ridge_predict(m, X)(0), 2.5, 1e-12);
  const RidgeModel none = ridge_fit(Eigen::MatrixXd(4, 0), y, 1.0);
  EXPECT_DOUBLE_EQ(none.intercept, 2.5);
}
