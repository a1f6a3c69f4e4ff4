#include "reimpute/designs.hpp"

#include "reimpute/errors.hpp"

#include "helpers.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

using namespace reimpute;

namespace {

// Chi-square style check: every support point's empirical frequency lies
// within 3 binomial standard errors of its enumerated probability.
void expect_sampler_matches(const Design& d, int draws, std::uint64_t seed) {
  const auto support = d.enumerate();
  std::map<TreatmentVector, double> prob;
  for (const auto& wa : support) prob[wa.z] = wa.probability;
  std::map<TreatmentVector, int> counts;
  Rng rng = child_stream(seed, 0, StreamPurpose::Design);
  for (int i = 0; i < draws; ++i) {
    const TreatmentVector z = d.sample(rng);
    ASSERT_TRUE(prob.count(z)) << "sampled an assignment outside the support";
    ++counts[z];
  }
  for (const auto& [z, p] : prob) {
    const double se = std::sqrt(p * (1 - p) / draws);
    EXPECT_NEAR(counts[z] / static_cast<double>(draws), p, 3.5 * se + 1e-12);
  }
}

GroupStructure strata(std::vector<int> m) { return GroupStructure(GroupStructure::Kind::Strata, std::move(m)); }

}  // namespace

TEST(Binomial, SmallAndOverflow) {
  EXPECT_EQ(binomial(4, 2), 6u);
  EXPECT_EQ(binomial(50, 25), 126410606437752ULL);
  EXPECT_EQ(binomial(3, 5), 0u);
  EXPECT_FALSE(binomial(200, 100).has_value());
}

TEST(Designs, CompleteMatchesBruteForce) {
  const Design d = Design::complete(6, 2);
  const auto support = d.enumerate();
  const auto brute = reimpute::testing::all_complete(6, 2);
  ASSERT_EQ(support.size(), brute.size());
  std::set<TreatmentVector> a, b(brute.begin(), brute.end());
  for (const auto& wa : support) {
    a.insert(wa.z);
    EXPECT_DOUBLE_EQ(wa.probability, 1.0 / 15.0);
  }
  EXPECT_EQ(a, b);
  EXPECT_EQ(d.support_size(), 15u);
}

TEST(Designs, StratifiedSupportIsProductOfBlocks) {
  const Design d = Design::stratified(strata({0, 0, 0, 1, 1, 1, 1}), {1, 2});
  EXPECT_EQ(d.support_size(), 3u * 6u);
  for (const auto& wa : d.enumerate()) {
    EXPECT_EQ(wa.z[0] + wa.z[1] + wa.z[2], 1);
    EXPECT_EQ(wa.z[3] + wa.z[4] + wa.z[5] + wa.z[6], 2);
  }
}

TEST(Designs, PairedFlipsWithinPairs) {
  const Design d = Design::paired(strata({0, 0, 1, 1, 2, 2}));
  EXPECT_EQ(d.support_size(), 8u);
  for (const auto& wa : d.enumerate()) EXPECT_EQ(wa.z[0] + wa.z[1], 1);
}

TEST(Designs, ClusterAssignsWholeClusters) {
  const GroupStructure g(GroupStructure::Kind::Clusters, {0, 0, 1, 1, 1, 2});
  const Design d = Design::cluster_complete(g, 1);
  const auto support = d.enumerate();
  ASSERT_EQ(support.size(), 3u);
  for (const auto& wa : support) {
    EXPECT_EQ(wa.z[0], wa.z[1]);
    EXPECT_EQ(wa.z[2], wa.z[3]);
    EXPECT_EQ(wa.z[3], wa.z[4]);
  }
}

TEST(Designs, BernoulliProbabilities) {
  const Design d = Design::bernoulli(3, 0.25);
  const auto support = d.enumerate();
  ASSERT_EQ(support.size(), 8u);
  double total = 0;
  for (const auto& wa : support) total += wa.probability;
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_NEAR(d.assignment_probability(TreatmentVector{1, 1, 1}), 1.0 / 64.0, 1e-15);
  EXPECT_FALSE(d.is_uniform());
}

TEST(Designs, SamplersMatchEnumeratedProbabilities) {
  expect_sampler_matches(Design::complete(5, 2), 20000, 1);
  expect_sampler_matches(Design::stratified(strata({0, 0, 0, 1, 1}), {1, 1}), 20000, 2);
  expect_sampler_matches(Design::bernoulli(3, 0.3), 20000, 3);
  expect_sampler_matches(
      Design::cluster_complete(GroupStructure(GroupStructure::Kind::Clusters, {0, 1, 1, 2, 3}), 2), 20000, 4);
}

TEST(Designs, EnumerationCapRefuses) {
  EXPECT_THROW(Design::complete(30, 15).enumerate(), RefusalError);
  EXPECT_NO_THROW(Design::complete(10, 5).enumerate(252));
  EXPECT_THROW(Design::complete(10, 5).enumerate(251), RefusalError);
}

TEST(Designs, ValidateObserved) {
  const Design d = Design::stratified(strata({0, 0, 1, 1}), {1, 1});
  EXPECT_NO_THROW(d.validate_observed(TreatmentVector{1, 0, 0, 1}));
  EXPECT_THROW(d.validate_observed(TreatmentVector{1, 1, 0, 0}), std::invalid_argument);
}

TEST(Designs, FromObservedReadsCounts) {
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(4, 1);
  const Dataset data(TreatmentVector{1, 0, 0, 1}, MaskedMatrix::complete(y), strata({0, 0, 1, 1}));
  const Design d = Design::from_observed(Design::Kind::Stratified, data);
  EXPECT_EQ(d.support_size(), 4u);
  EXPECT_EQ(Design::from_observed(Design::Kind::Complete, data).support_size(), 6u);
}

TEST(Designs, RejectsAdaptiveDesigns) {
  EXPECT_THROW(parse_design_kind("biased-coin"), std::invalid_argument);
  EXPECT_EQ(parse_design_kind("cluster"), Design::Kind::ClusterComplete);
}
