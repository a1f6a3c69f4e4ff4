#pragma once

#include "reimpute/core_data.hpp"
#include "reimpute/random.hpp"
#include "reimpute/regressor.hpp"

#include <memory>
#include <string_view>
#include <vector>

namespace reimpute {

/// The map (Z, X*, Y*) -> completed outcomes. Every imputer returns the
/// observed value unchanged wherever the outcome mask is false.
struct ImputerSpec {
  enum class Kind {
    /// Per-arm mean of observed outcomes; an arm without observed outcomes
    /// gets the midpoint (min + max) / 2 of all observed values, or 0.
    ArmMean,
    /// Median of observed outcomes (0 if none), ignoring Z.
    MedianDeterministic,
    /// Independent N(median, sample variance) draws per missing cell.
    MedianStochastic,
    /// Chained-equations sweeps with a regressor per incomplete column.
    ChainedEquations,
  };

  Kind kind = Kind::ArmMean;
  RegressorSpec regressor;
  int max_iter = 3;

  bool deterministic() const noexcept { return kind != Kind::MedianStochastic; }

  static ImputerSpec arm_mean() { return {Kind::ArmMean, {}, 3}; }
  static ImputerSpec median() { return {Kind::MedianDeterministic, {}, 3}; }
  static ImputerSpec stochastic_median() { return {Kind::MedianStochastic, {}, 3}; }
  static ImputerSpec chained(RegressorSpec regressor, int max_iter = 3) {
    return {Kind::ChainedEquations, regressor, max_iter};
  }
};

/// Completed N x K outcome matrix. Stochastic imputers draw from rng only.
Eigen::MatrixXd impute(const ImputerSpec& spec, const TreatmentVector& z,
                       const MaskedMatrix& x, const MaskedMatrix& y, Rng& rng);

/// Chained equations over covariates and outcomes together; returns the
/// completed N x (p + K) matrix [X | Y].
///
/// Missing cells start at their column's observed mean (0 when nothing is
/// observed). Each sweep visits incomplete covariate columns, then incomplete
/// outcome columns, in index order; the model for a column uses Z and the
/// current values of every other column as features.
Eigen::MatrixXd chained_impute(const RegressorSpec& regressor, int max_iter,
                               const TreatmentVector& z, const MaskedMatrix& x,
                               const MaskedMatrix& y);

/// An imputation rule fitted once on the observed data and then reused
/// unchanged for every permuted assignment (no re-imputation). Only useful
/// as a comparator: tests built on it are not valid in general.
class FrozenImputation {
 public:
  struct State;

  explicit FrozenImputation(std::shared_ptr<const State> state)
      : state_(std::move(state)) {}

  Eigen::MatrixXd apply(const TreatmentVector& z, Rng& rng) const;

 private:
  std::shared_ptr<const State> state_;
};

FrozenImputation freeze_imputation(const ImputerSpec& spec, const TreatmentVector& z,
                                   const MaskedMatrix& x, const MaskedMatrix& y);

std::string_view to_string(ImputerSpec::Kind kind);
ImputerSpec::Kind parse_imputer_kind(std::string_view name);

double median_of(std::vector<double> values);

}  // namespace reimpute
