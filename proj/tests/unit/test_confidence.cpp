#include "reimpute/confidence.hpp"

#include "helpers.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace reimpute;
using reimpute::testing::kNA;

namespace {

// Two-sample toy with an exact shift of 1 and no missingness.
Dataset shift_toy() {
  Eigen::MatrixXd y(10, 1);
  y << 1.9, 3.2, 2.4, 4.1, 2.8, 0.7, 2.5, 1.2, 1.6, 3.3;
  return Dataset(TreatmentVector{1, 1, 1, 1, 1, 0, 0, 0, 0, 0}, MaskedMatrix::complete(y));
}

// Classic permutation p-value for H_beta0 by brute force, two-sided.
double classic_p(const Dataset& d, double beta0) {
  Eigen::VectorXd adj = d.y().raw_values().col(0);
  for (Index i = 0; i < adj.size(); ++i)
    if (!d.z().treated(static_cast<std::size_t>(i))) adj(i) += beta0;
  const double t = permutational_t(d.z(), adj);
  const auto all = reimpute::testing::all_complete(10, 5);
  int ge = 0, le = 0;
  for (const auto& z : all) {
    const double v = permutational_t(z, adj);
    ge += at_least(v, t);
    le += at_most(v, t);
  }
  return std::min(1.0, 2.0 * std::min(ge, le) / static_cast<double>(all.size()));
}

InferenceSpec exact_spec() {
  InferenceSpec spec(Design::complete(10, 5));
  spec.mode = Mode::ExactEnumeration;
  spec.side = Side::TwoSided;
  return spec;
}

}  // namespace

TEST(Transform, Examples) {
  Eigen::MatrixXd y(2, 1);
  y << 2, 1;
  const Dataset d(TreatmentVector{1, 0}, MaskedMatrix::complete(y));
  const Dataset t = transform_outcomes(d, EffectModel::additive(), 0.5);
  EXPECT_EQ(t.y().raw_values()(0, 0), 2.0);
  EXPECT_EQ(t.y().raw_values()(1, 0), 1.5);
  EXPECT_EQ(transform_outcomes(d, EffectModel::additive(), 0.0).checksum(), d.checksum());

  Eigen::MatrixXd y2(2, 1);
  y2 << kNA, 3;
  const Dataset d2(TreatmentVector{0, 0}, MaskedMatrix::from_nan(y2));
  const Dataset t2 = transform_outcomes(d2, EffectModel::multiplicative(), 2.0);
  EXPECT_TRUE(t2.y().missing(0, 0));
  EXPECT_EQ(t2.y().raw_values()(1, 0), 6.0);
  EXPECT_THROW(transform_outcomes(d2, EffectModel::multiplicative(), 0.0), std::invalid_argument);
}

TEST(Transform, NeverChangesMaskExceptForMissingModifiers) {
  Eigen::MatrixXd x(3, 1), y(3, 1);
  x << 1, kNA, 2;
  y << 1, 2, kNA;
  const Dataset d = reimpute::testing::with_covariates(TreatmentVector{0, 1, 0}, x, y);
  EXPECT_TRUE((transform_outcomes(d, EffectModel::additive(), 3.0).y().mask() == d.y().mask()).all());
  const auto model = EffectModel::custom_model(
      [](double y0, double b, std::span<const double> xr) { return y0 + b * xr[0]; }, {0});
  const Dataset t = transform_outcomes(d, model, 2.0);
  EXPECT_EQ(t.y().raw_values()(0, 0), 3.0);
  EXPECT_TRUE(t.y().missing(1, 0));  // modifier missing, even though treated
}

TEST(TestEffect, ZeroIsPlainRun) {
  const Dataset d = shift_toy();
  InferenceSpec spec(Design::complete(10, 5));
  spec.runs = 500;
  spec.seed = 3;
  EXPECT_EQ(test_effect(spec, d, EffectModel::additive(), 0.0), run_test(spec, d).p_hat);
}

TEST(ConfidenceInterval, MatchesClassicPermutationInversion) {
  const Dataset d = shift_toy();
  const ConfidenceResult r = confidence_interval(exact_spec(), d, EffectModel::additive(), 0.05, {-2, 4, 0.25});
  ASSERT_EQ(r.grid.size(), 25u);
  for (std::size_t i = 0; i < r.grid.size(); ++i) EXPECT_DOUBLE_EQ(r.pvals[i], classic_p(d, r.grid[i]));
  EXPECT_TRUE(std::find(r.region.begin(), r.region.end(), 1.0) != r.region.end());
  ASSERT_TRUE(r.hull);
  EXPECT_LE(r.hull->first, 1.0);
  EXPECT_GE(r.hull->second, 1.0);
  EXPECT_FALSE(r.warning.empty());
}

TEST(ConfidenceInterval, NestingAndTinyAlpha) {
  const Dataset d = shift_toy();
  const Grid g{-2, 4, 0.5};
  const ConfidenceResult wide = confidence_interval(exact_spec(), d, EffectModel::additive(), 0.05, g);
  const ConfidenceResult narrow = confidence_interval(exact_spec(), d, EffectModel::additive(), 0.5, g);
  for (double b : narrow.region) EXPECT_NE(std::find(wide.region.begin(), wide.region.end(), b), wide.region.end());
  const ConfidenceResult all = confidence_interval(exact_spec(), d, EffectModel::additive(), 1e-12, g);
  EXPECT_EQ(all.region, all.grid);
}

TEST(ConfidenceInterval, FarValuesRejected) {
  const Dataset d = shift_toy();
  EXPECT_LT(test_effect(exact_spec(), d, EffectModel::additive(), 20.0), 0.05);
}

TEST(ConfidenceInterval, WorkerIndependentAndGridErrors) {
  const Dataset d = shift_toy();
  InferenceSpec spec(Design::complete(10, 5));
  spec.side = Side::TwoSided;
  spec.runs = 200;
  spec.seed = 11;
  const ConfidenceResult a = confidence_interval(spec, d, EffectModel::additive(), 0.05, {-1, 3, 0.5});
  spec.workers = 3;
  const ConfidenceResult b = confidence_interval(spec, d, EffectModel::additive(), 0.05, {-1, 3, 0.5});
  EXPECT_EQ(a.pvals, b.pvals);
  EXPECT_THROW(confidence_interval(spec, d, EffectModel::additive(), 0.05, {1, 1, 0.5}), std::invalid_argument);
  EXPECT_THROW(confidence_interval(spec, d, EffectModel::additive(), 0.05, {0, 1, 0}), std::invalid_argument);
}

TEST(Grid, PointsLandOnDecimals) {
  const auto p = Grid{-2, 4, 0.1}.points();
  ASSERT_EQ(p.size(), 61u);
  EXPECT_EQ(p[30], 1.0);
  EXPECT_EQ(p.back(), 4.0);
}
