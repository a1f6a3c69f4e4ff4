#include "reimpute/statistics.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace reimpute {
namespace {

void check_length(const TreatmentVector& z, Index n) {
  if (static_cast<Index>(z.size()) != n) {
    throw std::invalid_argument("statistic: treatment and value lengths differ");
  }
}

// Sum over treated members of `rows` of #{j in rows : y_i >= y_j}.
double ranked_sum(const TreatmentVector& z, const ColumnRef& y,
                  const std::vector<Index>& rows) {
  std::vector<double> sorted;
  sorted.reserve(rows.size());
  for (Index r : rows) sorted.push_back(y(r));
  std::sort(sorted.begin(), sorted.end());
  double total = 0.0;
  for (Index r : rows) {
    if (!z.treated(static_cast<std::size_t>(r))) continue;
    total += static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), y(r)) -
                                 sorted.begin());
  }
  return total;
}

}  // namespace

double permutational_t(const TreatmentVector& z, const ColumnRef& y) {
  check_length(z, y.size());
  double total = 0.0;
  for (Index i = 0; i < y.size(); ++i) {
    if (z.treated(static_cast<std::size_t>(i))) total += y(i);
  }
  return total;
}

double wilcoxon_rank_sum(const TreatmentVector& z, const ColumnRef& y) {
  check_length(z, y.size());
  std::vector<Index> rows(static_cast<std::size_t>(y.size()));
  for (Index i = 0; i < y.size(); ++i) rows[static_cast<std::size_t>(i)] = i;
  return ranked_sum(z, y, rows);
}

double adjusted_wilcoxon(const TreatmentVector& z, const ColumnRef& y,
                         const MaskColumn& frozen_mask) {
  check_length(z, y.size());
  if (frozen_mask.size() != y.size()) {
    throw std::invalid_argument("adjusted_wilcoxon: mask length differs from values");
  }
  std::vector<Index> observed, imputed;
  for (Index i = 0; i < y.size(); ++i) (frozen_mask(i) ? imputed : observed).push_back(i);
  return ranked_sum(z, y, observed) + ranked_sum(z, y, imputed);
}

double missingness_count_statistic(const TreatmentVector& z, const MaskArray& mask) {
  check_length(z, mask.rows());
  double total = 0.0;
  for (Index i = 0; i < mask.rows(); ++i) {
    if (z.treated(static_cast<std::size_t>(i))) total += static_cast<double>(mask.row(i).count());
  }
  return total;
}

TestStatistic TestStatistic::permutational_t(Index outcome) {
  TestStatistic t;
  t.kind_ = t.component_ = Kind::PermutationalT;
  t.outcome_ = outcome;
  return t;
}

TestStatistic TestStatistic::wilcoxon(Index outcome) {
  TestStatistic t;
  t.kind_ = t.component_ = Kind::WilcoxonRankSum;
  t.outcome_ = outcome;
  return t;
}

TestStatistic TestStatistic::adjusted_wilcoxon(MaskArray frozen_mask, Index outcome) {
  TestStatistic t;
  t.kind_ = t.component_ = Kind::AdjustedWilcoxon;
  t.outcome_ = outcome;
  t.mask_ = std::make_shared<const MaskArray>(std::move(frozen_mask));
  return t;
}

TestStatistic TestStatistic::linear_combination(Kind component, std::vector<double> weights,
                                                std::shared_ptr<const MaskArray> frozen_mask) {
  if (component == Kind::LinearCombination || component == Kind::MissingnessCount) {
    throw std::invalid_argument("linear_combination: component must be a per-outcome statistic");
  }
  if (component == Kind::AdjustedWilcoxon && !frozen_mask) {
    throw std::invalid_argument("linear_combination: adjusted Wilcoxon needs a frozen mask");
  }
  if (weights.empty()) throw std::invalid_argument("linear_combination: no weights");
  TestStatistic t;
  t.kind_ = Kind::LinearCombination;
  t.component_ = component;
  t.weights_ = std::move(weights);
  t.mask_ = std::move(frozen_mask);
  return t;
}

TestStatistic TestStatistic::missingness_count(MaskArray frozen_mask) {
  TestStatistic t;
  t.kind_ = t.component_ = Kind::MissingnessCount;
  t.mask_ = std::make_shared<const MaskArray>(std::move(frozen_mask));
  return t;
}

TestStatistic TestStatistic::for_outcome(Index k) const {
  TestStatistic t = *this;
  t.outcome_ = k;
  return t;
}

double TestStatistic::component_value(Kind kind, const TreatmentVector& z,
                                      const Eigen::MatrixXd& values, Index k) const {
  if (k < 0 || k >= values.cols()) {
    throw std::out_of_range("statistic: outcome index out of range");
  }
  switch (kind) {
    case Kind::PermutationalT:
      return reimpute::permutational_t(z, values.col(k));
    case Kind::WilcoxonRankSum:
      return wilcoxon_rank_sum(z, values.col(k));
    case Kind::AdjustedWilcoxon:
      if (mask_->cols() != values.cols()) {
        throw std::invalid_argument("adjusted_wilcoxon: mask shape differs from values");
      }
      return reimpute::adjusted_wilcoxon(z, values.col(k), mask_->col(k));
    default:
      throw std::logic_error("statistic: not a per-outcome component");
  }
}

double TestStatistic::evaluate(const TreatmentVector& z, const Eigen::MatrixXd& values) const {
  switch (kind_) {
    case Kind::LinearCombination: {
      if (static_cast<Index>(weights_.size()) != values.cols()) {
        throw std::invalid_argument("linear_combination: need one weight per outcome");
      }
      double total = 0.0;
      for (Index k = 0; k < values.cols(); ++k) {
        const double w = weights_[static_cast<std::size_t>(k)];
        if (w != 0.0) total += w * component_value(component_, z, values, k);
      }
      return total;
    }
    case Kind::MissingnessCount:
      return missingness_count_statistic(z, *mask_);
    default:
      return component_value(kind_, z, values, outcome_);
  }
}

std::string_view to_string(TestStatistic::Kind kind) {
  switch (kind) {
    case TestStatistic::Kind::PermutationalT: return "permutational-t";
    case TestStatistic::Kind::WilcoxonRankSum: return "wilcoxon";
    case TestStatistic::Kind::AdjustedWilcoxon: return "adjusted-wilcoxon";
    case TestStatistic::Kind::LinearCombination: return "linear-combination";
    case TestStatistic::Kind::MissingnessCount: return "missingness-count";
  }
  return "unknown";
}

TestStatistic::Kind parse_statistic_kind(std::string_view name) {
  if (name == "permutational-t" || name == "t") return TestStatistic::Kind::PermutationalT;
  if (name == "wilcoxon") return TestStatistic::Kind::WilcoxonRankSum;
  if (name == "adjusted-wilcoxon") return TestStatistic::Kind::AdjustedWilcoxon;
  if (name == "missingness-count") return TestStatistic::Kind::MissingnessCount;
  throw std::invalid_argument("unknown statistic '" + std::string(name) + "'");
}

}  // namespace reimpute
