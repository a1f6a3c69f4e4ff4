#include "reimpute/statistics.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace reimpute;

namespace {

// O(N^2) rank: number of values <= y_i among the given rows.
double naive_ranked(const TreatmentVector& z, const Eigen::VectorXd& y, const std::vector<int>& rows) {
  double total = 0;
  for (int i : rows) {
    if (!z.treated(static_cast<std::size_t>(i))) continue;
    for (int j : rows) total += y(i) >= y(j) ? 1 : 0;
  }
  return total;
}

}  // namespace

TEST(Statistics, PermutationalT) {
  Eigen::VectorXd y(4);
  y << 1, 0, 1, 0;
  EXPECT_EQ(permutational_t(TreatmentVector{1, 0, 1, 0}, y), 2.0);
  EXPECT_EQ(permutational_t(TreatmentVector{0, 1, 0, 1}, y), 0.0);
}

TEST(Statistics, WilcoxonMatchesNaiveRanksWithTies) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> small(0, 4);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 12;
    Eigen::VectorXd y(n);
    std::vector<std::uint8_t> zv(n);
    std::vector<int> all(n);
    for (int i = 0; i < n; ++i) {
      y(i) = small(rng);
      zv[static_cast<std::size_t>(i)] = small(rng) % 2;
      all[static_cast<std::size_t>(i)] = i;
    }
    const TreatmentVector z(zv);
    EXPECT_EQ(wilcoxon_rank_sum(z, y), naive_ranked(z, y, all));

    MaskColumn mask(n);
    std::vector<int> obs, imp;
    for (int i = 0; i < n; ++i) {
      mask(i) = small(rng) < 2;
      (mask(i) ? imp : obs).push_back(i);
    }
    EXPECT_EQ(adjusted_wilcoxon(z, y, mask), naive_ranked(z, y, obs) + naive_ranked(z, y, imp));
  }
}

TEST(Statistics, MissingnessCount) {
  MaskArray m(3, 2);
  m << true, true, false, true, true, false;
  EXPECT_EQ(missingness_count_statistic(TreatmentVector{1, 0, 1}, m), 3.0);
}

TEST(Statistics, LinearCombinationAndPerOutcome) {
  Eigen::MatrixXd y(3, 2);
  y << 1, 10, 2, 20, 3, 30;
  const TreatmentVector z{1, 0, 1};
  const auto lc = TestStatistic::linear_combination(TestStatistic::Kind::PermutationalT, {1.0, 0.5});
  EXPECT_EQ(lc.evaluate(z, y), 4.0 + 0.5 * 40.0);
  EXPECT_EQ(TestStatistic::permutational_t().for_outcome(1).evaluate(z, y), 40.0);
  const auto bad = TestStatistic::linear_combination(TestStatistic::Kind::PermutationalT, {1.0});
  EXPECT_THROW(bad.evaluate(z, y), std::invalid_argument);
}

TEST(Statistics, FrozenMaskIsUsedNotTheValues) {
  Eigen::MatrixXd y(4, 1);
  y << 3, 1, 2, 0;
  MaskArray m(4, 1);
  m << false, false, true, true;
  const auto t = TestStatistic::adjusted_wilcoxon(m);
  // Observed class {3, 1}: treated unit 0 has rank 2. Imputed {2, 0}: unit 2 rank 2.
  EXPECT_EQ(t.evaluate(TreatmentVector{1, 0, 1, 0}, y), 4.0);
}
