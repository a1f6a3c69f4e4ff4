#pragma once

#include "reimpute/inference.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace reimpute {

/// Y(1) = f(Y(0), beta, x), the same f for every outcome column.
struct EffectModel {
  enum class Kind { Additive, Multiplicative, Custom };
  using Function = std::function<double(double y0, double beta, std::span<const double> x)>;

  Kind kind = Kind::Additive;
  /// Custom only.
  Function custom;
  /// Covariate columns the custom f reads. Units with any of them missing
  /// have all their outcomes treated as missing.
  std::vector<Index> modifiers;

  static EffectModel additive() { return {}; }
  static EffectModel multiplicative() { return {Kind::Multiplicative, {}, {}}; }
  static EffectModel custom_model(Function f, std::vector<Index> modifiers = {}) {
    return {Kind::Custom, std::move(f), std::move(modifiers)};
  }
};

/// Treated cells unchanged, observed control cells mapped through f, missing
/// cells left missing. Multiplicative needs beta0 > 0.
Dataset transform_outcomes(const Dataset& data, const EffectModel& model, double beta0);

/// p-value for H_beta0 from the engine selected by spec (with spec.seed).
double test_effect(const InferenceSpec& spec, const Dataset& data, const EffectModel& model,
                   double beta0);

struct Grid {
  double lo = 0.0;
  double hi = 0.0;
  double step = 0.0;

  /// lo, lo + step, ... up to hi (inclusive within rounding).
  std::vector<double> points() const;
};

struct ConfidenceResult {
  std::vector<double> grid;
  std::vector<double> pvals;
  /// Grid points with p >= alpha, ascending.
  std::vector<double> region;
  /// [min, max] of the region; empty when nothing is retained.
  std::optional<std::pair<double, double>> hull;
  /// False when some grid point between the hull ends was rejected.
  bool contiguous = true;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  Side side = Side::TwoSided;
  std::string warning;
};

/// Test inversion over a grid. Grid point i is tested with seed
/// derive_seed(spec.seed, i, Grid).
ConfidenceResult confidence_interval(const InferenceSpec& spec, const Dataset& data,
                                     const EffectModel& model, double alpha, const Grid& grid);

std::string_view to_string(EffectModel::Kind kind);
EffectModel::Kind parse_effect_kind(std::string_view name);

}  // namespace reimpute
