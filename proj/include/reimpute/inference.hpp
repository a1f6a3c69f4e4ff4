#pragma once

#include "reimpute/core_data.hpp"
#include "reimpute/designs.hpp"
#include "reimpute/imputation.hpp"
#include "reimpute/regressor.hpp"
#include "reimpute/statistics.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace reimpute {

enum class Side { Greater, Less, TwoSided };
enum class Mode { MonteCarlo, ExactEnumeration };

/// Everything needed to run one imputation-assisted randomization test.
struct InferenceSpec {
  explicit InferenceSpec(Design d) : design(std::move(d)) {}

  Design design;
  ImputerSpec imputer = ImputerSpec::median();
  /// Working model H for covariate adjustment, fitted on (X*, completed Y)
  /// without Z. Only consulted by run_algorithm2.
  std::optional<RegressorSpec> adjuster;
  TestStatistic statistic = TestStatistic::permutational_t();
  /// Evaluate the statistic on every outcome separately and report one
  /// p-value per outcome plus Holm-adjusted values.
  bool per_outcome = false;
  std::int64_t runs = 10'000;
  Side side = Side::Greater;
  std::uint64_t seed = 0;
  Mode mode = Mode::MonteCarlo;
  /// (1 + count) / (1 + L) instead of count / L.
  bool conservative = false;
  int workers = 1;
  std::uint64_t enumeration_cap = kDefaultEnumerationCap;
  bool keep_draws = true;
  /// Re-digest X* and Y* before every run and count any change.
  bool audit_inputs = false;
};

struct Fraction {
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 1;
  double value() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }
  friend bool operator==(const Fraction&, const Fraction&) = default;
};

/// One statistic's observed value and tail counts.
struct ComponentResult {
  double t_obs = 0.0;
  /// Monte Carlo: number of runs with T >= t (resp. <= t). Exact: number of
  /// support points.
  std::int64_t count_ge = 0;
  std::int64_t count_le = 0;
  double p_greater = 0.0;
  double p_less = 0.0;
  double p_hat = 0.0;  // per the requested side
  /// Exact p-value as a reduced fraction, for exact mode on uniform designs.
  std::optional<Fraction> exact;
};

struct InferenceResult {
  Mode mode = Mode::MonteCarlo;
  Side side = Side::Greater;
  std::uint64_t seed = 0;
  std::int64_t runs = 0;  // L, or |support| in exact mode
  bool conservative = false;
  bool covariate_adjusted = false;
  bool one_shot = false;

  std::vector<ComponentResult> components;
  /// Holm-adjusted per-outcome p-values (per_outcome only).
  std::vector<double> holm_adjusted;
  /// Headline p-value: the single component's p_hat, or the smallest
  /// Holm-adjusted value in per-outcome mode.
  double p_hat = 0.0;

  /// Row-major runs x components statistic draws (if kept).
  std::vector<double> draws;
  /// Exact mode: assignment probabilities and the assignments themselves,
  /// in enumeration order.
  std::vector<double> draw_weights;
  std::vector<TreatmentVector> assignments;

  std::uint64_t input_checksum = 0;
  std::int64_t audit_mismatches = 0;

  /// Half-width eps with P(|p_hat - p| >= eps) <= delta for this L.
  double hoeffding_half_width(double delta) const;
};

/// Imputation and re-imputation: impute on the observed assignment to get t,
/// then for each run draw Z^(l) from the design, re-impute from the original
/// (X*, Y*) and evaluate T^(l). Any adjuster in spec is ignored.
InferenceResult run_algorithm1(const InferenceSpec& spec, const Dataset& data);

/// As run_algorithm1 with a covariate-adjustment step after every
/// imputation: the statistic is evaluated on residuals Yhat - H(X*, Yhat).
InferenceResult run_algorithm2(const InferenceSpec& spec, const Dataset& data);

/// Dispatches to run_algorithm2 when spec.adjuster is set.
InferenceResult run_test(const InferenceSpec& spec, const Dataset& data);

/// One-shot imputation comparator: the imputation rule is fitted once on the
/// observed data and reused for every assignment. Not a valid test.
InferenceResult run_one_shot_comparator(const InferenceSpec& spec, const Dataset& data);

/// Smallest L with 2 exp(-2 L eps^2) <= delta.
std::int64_t required_runs(double eps, double delta);

/// 2 exp(-2 L eps^2).
double hoeffding_bound(std::int64_t runs, double eps);

struct HolmResult {
  std::vector<double> adjusted;
  std::vector<bool> rejected;
};

/// Holm step-down adjustment; adjusted values are reported in input order.
HolmResult holm_bonferroni(std::span<const double> pvals, double alpha = 0.05);

/// Tail comparison used for every p-value: T >= t up to a relative rounding
/// allowance of 1e-9.
bool at_least(double value, double threshold) noexcept;
bool at_most(double value, double threshold) noexcept;

/// Combines tail probabilities per the requested side.
double sided_p_value(Side side, double p_greater, double p_less);

std::string_view to_string(Side side);
Side parse_side(std::string_view name);
std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view name);

}  // namespace reimpute
