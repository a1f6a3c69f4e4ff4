#include "reimpute/imputation.hpp"

#include "helpers.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace reimpute;
using reimpute::testing::kNA;

namespace {

std::vector<ImputerSpec> all_imputers() {
  return {ImputerSpec::arm_mean(), ImputerSpec::median(), ImputerSpec::stochastic_median(),
          ImputerSpec::chained(RegressorSpec::ridge()), ImputerSpec::chained(RegressorSpec::boosting({10, 0.1, 2, 2}))};
}

Dataset random_dataset(std::uint64_t seed, int n, double miss) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::bernoulli_distribution coin(miss);
  Eigen::MatrixXd x(n, 2), y(n, 2);
  std::vector<std::uint8_t> z(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    z[static_cast<std::size_t>(i)] = i % 2;
    x(i, 0) = nd(rng);
    x(i, 1) = coin(rng) ? kNA : nd(rng);
    y(i, 0) = coin(rng) ? kNA : x(i, 0) + nd(rng);
    y(i, 1) = coin(rng) ? kNA : nd(rng);
  }
  y(0, 0) = 1.0;
  y(0, 1) = 1.0;
  return reimpute::testing::with_covariates(TreatmentVector(z), x, y);
}

}  // namespace

TEST(Imputation, EveryImputerPreservesObservedCells) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Dataset d = random_dataset(seed, 20, 0.3);
    for (const auto& spec : all_imputers()) {
      Rng rng = child_stream(seed, 0, StreamPurpose::Imputation);
      const Eigen::MatrixXd out = impute(spec, d.z(), d.x(), d.y(), rng);
      for (Index r = 0; r < out.rows(); ++r)
        for (Index k = 0; k < out.cols(); ++k) {
          if (auto v = d.y().cell(r, k)) {
            EXPECT_EQ(out(r, k), *v);
          } else {
            EXPECT_TRUE(std::isfinite(out(r, k)));
          }
        }
      const Eigen::MatrixXd frozen = freeze_imputation(spec, d.z(), d.x(), d.y()).apply(d.z(), rng);
      for (Index r = 0; r < out.rows(); ++r)
        for (Index k = 0; k < out.cols(); ++k)
          if (auto v = d.y().cell(r, k)) EXPECT_EQ(frozen(r, k), *v);
    }
  }
}

TEST(Imputation, ArmMeanFourUnit) {
  const Dataset d = reimpute::testing::four_unit();
  Rng rng(0);
  const Eigen::MatrixXd out = impute(ImputerSpec::arm_mean(), d.z(), d.x(), d.y(), rng);
  EXPECT_EQ(out(2, 0), 1.0);
  EXPECT_EQ(out(3, 0), 0.0);
  // Under Z = (1, 1, 0, 0): no observed treated value in arm 0 -> midpoint 0.5.
  const Eigen::MatrixXd alt = impute(ImputerSpec::arm_mean(), TreatmentVector{0, 0, 1, 1}, d.x(), d.y(), rng);
  EXPECT_EQ(alt(2, 0), 0.5);
  EXPECT_EQ(alt(3, 0), 0.5);
}

TEST(Imputation, MedianFourUnit) {
  const Dataset d = reimpute::testing::four_unit();
  Rng rng(0);
  const Eigen::MatrixXd out = impute(ImputerSpec::median(), d.z(), d.x(), d.y(), rng);
  EXPECT_EQ(out(2, 0), 0.5);
  EXPECT_EQ(out(3, 0), 0.5);
  EXPECT_EQ(median_of({3, 1, 2}), 2.0);
  EXPECT_EQ(median_of({}), 0.0);
}

TEST(Imputation, StochasticMedianMoments) {
  Eigen::MatrixXd y(4, 1);
  y << 1, 2, 4, kNA;
  const Dataset d(TreatmentVector{1, 0, 1, 0}, MaskedMatrix::from_nan(y));
  Rng rng(3);
  double sum = 0, sq = 0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const double v = impute(ImputerSpec::stochastic_median(), d.z(), d.x(), d.y(), rng)(3, 0);
    sum += v;
    sq += v * v;
  }
  const double mean = sum / n, var = sq / n - mean * mean;
  // median 2, sample variance of (1, 2, 4) = 7/3.
  EXPECT_NEAR(mean, 2.0, 4 * std::sqrt(7.0 / 3.0 / n));
  EXPECT_NEAR(var, 7.0 / 3.0, 0.1);
}

TEST(Imputation, StochasticMedianZeroVarianceIsPointMass) {
  Eigen::MatrixXd y(3, 1);
  y << 5, 5, kNA;
  const Dataset d(TreatmentVector{1, 0, 0}, MaskedMatrix::from_nan(y));
  Rng rng(1);
  EXPECT_EQ(impute(ImputerSpec::stochastic_median(), d.z(), d.x(), d.y(), rng)(2, 0), 5.0);
}

TEST(Imputation, ChainedRecoversExactLinearOutcome) {
  Eigen::MatrixXd x(8, 1), y(8, 1);
  for (int i = 0; i < 8; ++i) {
    x(i, 0) = i;
    y(i, 0) = 1.0 + 2.0 * i + 3.0 * (i % 2);
  }
  y(2, 0) = kNA;
  y(5, 0) = kNA;
  std::vector<std::uint8_t> z{0, 1, 0, 1, 0, 1, 0, 1};
  const Dataset d = reimpute::testing::with_covariates(TreatmentVector(z), x, y);
  Rng rng(0);
  const Eigen::MatrixXd out = impute(ImputerSpec::chained(RegressorSpec::ridge(0.0)), d.z(), d.x(), d.y(), rng);
  EXPECT_NEAR(out(2, 0), 5.0, 1e-8);
  EXPECT_NEAR(out(5, 0), 14.0, 1e-8);
}

TEST(Imputation, ChainedFillsCovariatesToo) {
  const Dataset d = random_dataset(7, 30, 0.2);
  const Eigen::MatrixXd full = chained_impute(RegressorSpec::ridge(), 3, d.z(), d.x(), d.y());
  EXPECT_EQ(full.cols(), 4);
  EXPECT_TRUE(full.allFinite());
  for (Index r = 0; r < 30; ++r)
    if (auto v = d.x().cell(r, 1)) EXPECT_EQ(full(r, 1), *v);
}

TEST(Imputation, FrozenRuleDoesNotRefit) {
  // The frozen arm-mean rule keeps the observed-assignment fills.
  const Dataset d = reimpute::testing::four_unit();
  const FrozenImputation f = freeze_imputation(ImputerSpec::arm_mean(), d.z(), d.x(), d.y());
  Rng rng(0);
  const Eigen::MatrixXd out = f.apply(TreatmentVector{0, 0, 1, 1}, rng);
  EXPECT_EQ(out(2, 0), 1.0);
  EXPECT_EQ(out(3, 0), 1.0);
}

TEST(Imputation, ParseNames) {
  EXPECT_EQ(parse_imputer_kind("chained"), ImputerSpec::Kind::ChainedEquations);
  EXPECT_THROW(parse_imputer_kind("mice"), std::invalid_argument);
  EXPECT_FALSE(ImputerSpec::stochastic_median().deterministic());
}
