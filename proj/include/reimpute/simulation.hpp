#pragma once

#include "reimpute/confidence.hpp"
#include "reimpute/inference.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace reimpute {

/// Where the latent missingness score comes from.
enum class MissingnessMode {
  /// The model's own score, which involves the outcomes.
  OutcomeDependent,
  /// (1/sqrt 5) sum_p p x_p + u: covariates and the unobserved u only.
  CovariateOnly,
};

/// Stratified finite-population generator: strata of 10 units, 5 treated.
/// Model 5 has three outcomes, every other model one.
struct SimModel {
  int id = 1;
  double beta = 0.0;
  Index n = 50;
  double missing_rate = 0.5;
  MissingnessMode missingness = MissingnessMode::OutcomeDependent;

  Index outcomes() const noexcept { return id == 5 ? 3 : 1; }
};

struct SimDataset {
  Dataset masked;
  Dataset oracle;  // same units with every outcome observed
};

/// Exactly round(missing_rate * n) cells are masked in every outcome column:
/// the units with the largest latent scores, ties going to the lower index.
SimDataset generate(const SimModel& model, Rng& rng);

enum class SimMethod {
  Median,         // stochastic median imputation
  Algo1Linear,    // re-imputation, chained ridge
  Algo1Boosting,  // re-imputation, chained boosting
  Algo2Linear,    // Algo1Linear plus ridge covariate adjustment
  Algo2Boosting,  // Algo1Boosting plus boosting covariate adjustment
  Oracle,         // true outcomes, no imputation
  OneShotLinear,  // chained ridge fitted once, no re-imputation
};

/// Engine configuration of a method on a generated dataset. Every method
/// uses the adjusted Wilcoxon statistic with the masked dataset's mask and
/// the stratified design; multi-outcome data is tested per outcome.
InferenceSpec method_spec(SimMethod method, const Dataset& masked, std::int64_t runs,
                          std::uint64_t seed, Side side);

/// Runs one method and returns its headline p-value.
double run_method(SimMethod method, const SimDataset& data, std::int64_t runs,
                  std::uint64_t seed, Side side);

struct StudyConfig {
  SimModel model;
  std::vector<SimMethod> methods;
  std::int64_t replications = 500;
  std::int64_t runs = 300;
  double alpha = 0.05;
  Side side = Side::Greater;
  std::uint64_t seed = 0;
  int workers = 1;
};

struct MethodRow {
  std::string method;
  double beta = 0.0;
  std::string metric;  // "rejection" or "coverage"
  std::int64_t successes = 0;
  std::int64_t replications = 0;
  double rate = 0.0;
  double se = 0.0;  // binomial standard error
  double runtime_seconds = 0.0;
};

struct SimReport {
  StudyConfig config;
  std::vector<MethodRow> rows;
};

/// Rejection rates at beta = 0.
SimReport run_validity_study(const StudyConfig& config);

/// Rejection rates for each beta.
SimReport run_power_study(const StudyConfig& config, std::span<const double> betas);

/// Share of replications whose additive-effect confidence hull contains
/// config.model.beta.
SimReport run_coverage_study(const StudyConfig& config, SimMethod method, const Grid& grid);

std::string_view to_string(SimMethod method);
SimMethod parse_sim_method(std::string_view name);
std::string_view to_string(MissingnessMode mode);
MissingnessMode parse_missingness_mode(std::string_view name);

}  // namespace reimpute
