#pragma once

#include "reimpute/core_data.hpp"

#include <memory>
#include <string_view>
#include <vector>

namespace reimpute {

using ColumnRef = Eigen::Ref<const Eigen::VectorXd>;
using MaskColumn = Eigen::Array<bool, Eigen::Dynamic, 1>;

/// Sum of values over treated units.
double permutational_t(const TreatmentVector& z, const ColumnRef& y);

/// Sum over treated units of rank(y_i) = #{j : y_i >= y_j}. Tied values
/// share the same rank; no mid-rank correction.
double wilcoxon_rank_sum(const TreatmentVector& z, const ColumnRef& y);

/// Like wilcoxon_rank_sum, but each unit is ranked only against units in
/// its own missingness class (observed vs imputed) under frozen_mask.
double adjusted_wilcoxon(const TreatmentVector& z, const ColumnRef& y,
                         const MaskColumn& frozen_mask);

/// Number of missing outcome cells among treated units.
double missingness_count_statistic(const TreatmentVector& z, const MaskArray& mask);

/// A pure function T(Z, completed values). AdjustedWilcoxon and
/// MissingnessCount carry the dataset's original mask, fixed at
/// construction and reused for every assignment.
class TestStatistic {
 public:
  enum class Kind {
    PermutationalT,
    WilcoxonRankSum,
    AdjustedWilcoxon,
    LinearCombination,
    MissingnessCount,
  };

  static TestStatistic permutational_t(Index outcome = 0);
  static TestStatistic wilcoxon(Index outcome = 0);
  static TestStatistic adjusted_wilcoxon(MaskArray frozen_mask, Index outcome = 0);
  /// sum_k weights[k] * T_k, with T_k the component statistic on outcome k.
  static TestStatistic linear_combination(Kind component, std::vector<double> weights,
                                          std::shared_ptr<const MaskArray> frozen_mask = {});
  static TestStatistic missingness_count(MaskArray frozen_mask);

  Kind kind() const noexcept { return kind_; }
  Kind component() const noexcept { return component_; }
  Index outcome() const noexcept { return outcome_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  bool has_frozen_mask() const noexcept { return static_cast<bool>(mask_); }
  const MaskArray& frozen_mask() const { return *mask_; }

  /// Same statistic on a different outcome column.
  TestStatistic for_outcome(Index k) const;

  double evaluate(const TreatmentVector& z, const Eigen::MatrixXd& values) const;

 private:
  double component_value(Kind kind, const TreatmentVector& z,
                         const Eigen::MatrixXd& values, Index k) const;

  Kind kind_ = Kind::PermutationalT;
  Kind component_ = Kind::PermutationalT;
  Index outcome_ = 0;
  std::vector<double> weights_;
  std::shared_ptr<const MaskArray> mask_;
};

std::string_view to_string(TestStatistic::Kind kind);
TestStatistic::Kind parse_statistic_kind(std::string_view name);

}  // namespace reimpute
