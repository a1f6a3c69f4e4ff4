#include "reimpute/simulation.hpp"

#include "reimpute/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace reimpute {
namespace {

constexpr int kStratumSize = 10;
constexpr int kTreatedPerStratum = 5;
constexpr int kCovariates = 5;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double laplace_quantile(double p, double location, double scale) {
  p = std::clamp(p, 1e-300, 1.0 - 1e-16);
  return p < 0.5 ? location + scale * std::log(2.0 * p)
                 : location - scale * std::log(2.0 * (1.0 - p));
}

struct UnitTerms {
  double s1 = 0, s_sig1m = 0, s_abs = 0, s_p = 0, s_pcos = 0, s_sq = 0, s_sig = 0, s_cube = 0,
         s_cos = 0;
};

UnitTerms terms(const double* x) {
  UnitTerms t;
  for (int p = 0; p < kCovariates; ++p) {
    const double v = x[p];
    const double w = p + 1;
    t.s1 += v;
    t.s_sig1m += sigmoid(1.0 - v);
    t.s_abs += std::abs(v);
    t.s_p += w * v;
    t.s_pcos += w * std::cos(v);
    t.s_sq += v * v;
    t.s_sig += sigmoid(v);
    t.s_cube += v * v * v;
    t.s_cos += std::cos(v);
  }
  return t;
}

MaskArray calibrated_mask(const Eigen::MatrixXd& scores, double rate) {
  const Index n = scores.rows();
  const auto count = static_cast<Index>(std::llround(rate * static_cast<double>(n)));
  MaskArray mask = MaskArray::Constant(n, scores.cols(), false);
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index k = 0; k < scores.cols(); ++k) {
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return scores(a, k) > scores(b, k); });
    for (Index i = 0; i < count; ++i) mask(order[static_cast<std::size_t>(i)], k) = true;
  }
  return mask;
}

}  // namespace

SimDataset generate(const SimModel& model, Rng& rng) {
  if (model.id < 1 || model.id > 6) throw std::invalid_argument("model id must be 1..6");
  if (model.n < kStratumSize || model.n % kStratumSize != 0) {
    throw std::invalid_argument("N must be a positive multiple of 10");
  }
  if (!(model.missing_rate > 0.0 && model.missing_rate < 1.0)) {
    throw std::invalid_argument("missing rate must lie in (0, 1)");
  }
  const Index n = model.n;
  const Index strata = n / kStratumSize;
  const Index K = model.outcomes();
  std::normal_distribution<double> std_normal(0.0, 1.0);
  std::bernoulli_distribution bern(1.0 / 3.0);

  Eigen::MatrixXd x(n, kCovariates);
  const double rho34 = 1.0 / std::sqrt(2.0);
  for (Index i = 0; i < n; ++i) {
    const double a = std_normal(rng), b = std_normal(rng);
    x(i, 0) = 0.5 + a;
    x(i, 1) = -1.0 / 3.0 + 0.5 * a + std::sqrt(0.75) * b;
    const double c = std_normal(rng), d = std_normal(rng);
    const double g3 = c, g4 = rho34 * c + std::sqrt(1.0 - rho34 * rho34) * d;
    x(i, 2) = laplace_quantile(normal_cdf(g3), 0.0, 1.0);
    x(i, 3) = laplace_quantile(normal_cdf(g4), 1.0 / std::sqrt(3.0), 1.0);
    x(i, 4) = bern(rng) ? 1.0 : 0.0;
  }
  Eigen::VectorXd u(n);
  for (Index i = 0; i < n; ++i) u(i) = std::sqrt(0.2) * std_normal(rng);
  Eigen::MatrixXd alpha(strata, K);
  for (Index s = 0; s < strata; ++s)
    for (Index k = 0; k < K; ++k) alpha(s, k) = std::sqrt(0.1) * std_normal(rng);
  Eigen::MatrixXd eps(n, K);
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < K; ++k) eps(i, k) = std::sqrt(0.2) * std_normal(rng);

  std::vector<int> membership(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) membership[static_cast<std::size_t>(i)] = static_cast<int>(i / kStratumSize);
  GroupStructure groups(GroupStructure::Kind::Strata, membership);
  const Design design = Design::stratified(groups, std::vector<Index>(static_cast<std::size_t>(strata), kTreatedPerStratum));
  const TreatmentVector z = design.sample(rng);

  const double r5 = std::sqrt(5.0);
  const double beta = model.beta;
  Eigen::MatrixXd y(n, K);
  Eigen::MatrixXd score(n, K);
  std::vector<UnitTerms> t(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const Eigen::Matrix<double, 1, kCovariates> row = x.row(i);
    t[static_cast<std::size_t>(i)] = terms(row.data());
  }
  for (Index i = 0; i < n; ++i) {
    const UnitTerms& q = t[static_cast<std::size_t>(i)];
    const double zi = z.treated(static_cast<std::size_t>(i)) ? 1.0 : 0.0;
    const Index s = i / kStratumSize;
    const double x1 = x(i, 0);
    const double noise = u(i) + alpha(s, 0) + eps(i, 0);
    switch (model.id) {
      case 1: y(i, 0) = beta * zi + q.s1 / r5 + noise; break;
      case 2: y(i, 0) = beta * zi + q.s1 / r5 + q.s1 * q.s_sig1m / 5.0 + noise; break;
      case 3:
      case 4:
        y(i, 0) = beta * zi * (1.0 + x1 + q.s_abs / r5) + q.s1 / r5 + q.s1 * q.s_sig1m / 5.0 + noise;
        break;
      case 6: y(i, 0) = beta * zi * x1 * x1 + q.s_sq / r5 + noise; break;
      case 5:
        y(i, 0) = 0.25 * beta * zi + q.s1 + q.s1 * q.s1 / r5 + std::sin(u(i)) + alpha(s, 0) + eps(i, 0);
        y(i, 1) = beta * zi * (1.0 + x1 + u(i)) - q.s1 * q.s_sig1m / r5 + alpha(s, 1) + eps(i, 1);
        y(i, 2) = beta * zi * q.s_abs + q.s1 * q.s1 * q.s_cos / 5.0 + u(i) + alpha(s, 2) + eps(i, 2);
        break;
    }
  }

  if (model.missingness == MissingnessMode::CovariateOnly) {
    for (Index i = 0; i < n; ++i)
      for (Index k = 0; k < K; ++k) score(i, k) = t[static_cast<std::size_t>(i)].s_p / r5 + u(i);
  } else {
    Eigen::VectorXd stratum_x1 = Eigen::VectorXd::Zero(strata), stratum_y = Eigen::VectorXd::Zero(strata);
    for (Index i = 0; i < n; ++i) {
      stratum_x1(i / kStratumSize) += x(i, 0);
      stratum_y(i / kStratumSize) += y(i, 0);
    }
    for (Index i = 0; i < n; ++i) {
      const UnitTerms& q = t[static_cast<std::size_t>(i)];
      const Index s = i / kStratumSize;
      const double nonlinear = q.s_p / r5 + q.s_pcos / r5 + 10.0 * sigmoid(y(i, 0)) + u(i);
      switch (model.id) {
        case 1: score(i, 0) = q.s_p / r5 + y(i, 0) + u(i); break;
        case 2:
        case 3: score(i, 0) = nonlinear; break;
        case 4: score(i, 0) = nonlinear + (stratum_x1(s) + stratum_y(s)) / 3.0; break;
        case 6: score(i, 0) = nonlinear + (stratum_x1(s) + stratum_y(s)) / 10.0; break;
        case 5: {
          const double sig_y = sigmoid(y(i, 0)) + sigmoid(y(i, 1)) + sigmoid(y(i, 2));
          const double s1sq = q.s1 * q.s1;
          score(i, 0) = q.s_sig / r5 + s1sq / 5.0 + 5.0 * sigmoid(y(i, 0)) + u(i);
          score(i, 1) = q.s_cube / r5 + s1sq / 5.0 + 2.5 * sig_y + sigmoid(1.0 - u(i));
          score(i, 2) = q.s_p / r5 + s1sq * q.s1 / (5.0 * r5) + sig_y * 5.0 / 3.0 + std::sin(u(i) * u(i));
          break;
        }
      }
    }
  }

  ColumnNames names;
  for (int p = 1; p <= kCovariates; ++p) names.covariates.push_back("x" + std::to_string(p));
  for (Index k = 1; k <= K; ++k) names.outcomes.push_back("y" + std::to_string(k));
  names.group = "stratum";
  MaskedMatrix xm = MaskedMatrix::complete(x);
  Dataset oracle(z, xm, MaskedMatrix::complete(y), groups, names);
  Dataset masked(z, xm, MaskedMatrix(y, calibrated_mask(score, model.missing_rate)), groups, names);
  return {std::move(masked), std::move(oracle)};
}

InferenceSpec method_spec(SimMethod method, const Dataset& masked, std::int64_t runs,
                          std::uint64_t seed, Side side) {
  InferenceSpec spec(Design::from_observed(Design::Kind::Stratified, masked));
  spec.statistic = TestStatistic::adjusted_wilcoxon(masked.y().mask());
  spec.per_outcome = masked.outcomes() > 1;
  spec.runs = runs;
  spec.seed = seed;
  spec.side = side;
  spec.keep_draws = false;
  switch (method) {
    case SimMethod::Median: spec.imputer = ImputerSpec::stochastic_median(); break;
    case SimMethod::Algo1Linear:
    case SimMethod::OneShotLinear: spec.imputer = ImputerSpec::chained(RegressorSpec::ridge()); break;
    case SimMethod::Algo1Boosting: spec.imputer = ImputerSpec::chained(RegressorSpec::boosting()); break;
    case SimMethod::Algo2Linear:
      spec.imputer = ImputerSpec::chained(RegressorSpec::ridge());
      spec.adjuster = RegressorSpec::ridge();
      break;
    case SimMethod::Algo2Boosting:
      spec.imputer = ImputerSpec::chained(RegressorSpec::boosting());
      spec.adjuster = RegressorSpec::boosting();
      break;
    case SimMethod::Oracle: spec.imputer = ImputerSpec::arm_mean(); break;
  }
  return spec;
}

double run_method(SimMethod method, const SimDataset& data, std::int64_t runs, std::uint64_t seed,
                  Side side) {
  const InferenceSpec spec = method_spec(method, data.masked, runs, seed, side);
  switch (method) {
    case SimMethod::Oracle: return run_algorithm1(spec, data.oracle).p_hat;
    case SimMethod::OneShotLinear: return run_one_shot_comparator(spec, data.masked).p_hat;
    default: return run_test(spec, data.masked).p_hat;
  }
}

namespace {

void check(const StudyConfig& c) {
  if (c.replications < 1) throw std::invalid_argument("replications must be >= 1");
  if (c.runs < 1) throw std::invalid_argument("runs must be >= 1");
  if (!(c.alpha > 0.0 && c.alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
  if (c.methods.empty()) throw std::invalid_argument("no methods selected");
}

MethodRow make_row(std::string_view method, double beta, std::string metric, std::int64_t hits,
                   std::int64_t reps, double seconds) {
  MethodRow row;
  row.method = std::string(method);
  row.beta = beta;
  row.metric = std::move(metric);
  row.successes = hits;
  row.replications = reps;
  row.rate = static_cast<double>(hits) / static_cast<double>(reps);
  row.se = std::sqrt(row.rate * (1.0 - row.rate) / static_cast<double>(reps));
  row.runtime_seconds = seconds;
  return row;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Replication r generates from child (seed, r, Generator) and tests with
// seed derive_seed(seed, r, Replication), shared by all methods.
void rejection_rows(const StudyConfig& config, double beta, std::vector<MethodRow>& rows) {
  SimModel model = config.model;
  model.beta = beta;
  const std::size_t m = config.methods.size();
  std::vector<std::atomic<std::int64_t>> hits(m);
  std::vector<std::atomic<std::int64_t>> nanos(m);
  parallel_for(config.replications, config.workers, [&](std::int64_t r) {
    Rng rng = child_stream(config.seed, static_cast<std::uint64_t>(r), StreamPurpose::Generator);
    const SimDataset data = generate(model, rng);
    const std::uint64_t seed = derive_seed(config.seed, static_cast<std::uint64_t>(r), StreamPurpose::Replication);
    for (std::size_t j = 0; j < m; ++j) {
      const auto start = Clock::now();
      const double p = run_method(config.methods[j], data, config.runs, seed, config.side);
      nanos[j] += std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count();
      if (p <= config.alpha) ++hits[j];
    }
  });
  for (std::size_t j = 0; j < m; ++j) {
    rows.push_back(make_row(to_string(config.methods[j]), beta, "rejection", hits[j].load(),
                            config.replications, static_cast<double>(nanos[j].load()) * 1e-9));
  }
}

}  // namespace

SimReport run_validity_study(const StudyConfig& config) {
  check(config);
  SimReport report{config, {}};
  report.config.model.beta = 0.0;
  rejection_rows(config, 0.0, report.rows);
  return report;
}

SimReport run_power_study(const StudyConfig& config, std::span<const double> betas) {
  check(config);
  if (betas.empty()) throw std::invalid_argument("no effect sizes given");
  SimReport report{config, {}};
  for (double b : betas) rejection_rows(config, b, report.rows);
  return report;
}

SimReport run_coverage_study(const StudyConfig& config, SimMethod method, const Grid& grid) {
  StudyConfig c = config;
  c.methods = {method};
  check(c);
  if (method == SimMethod::Oracle || method == SimMethod::OneShotLinear) {
    throw std::invalid_argument("coverage study needs a re-imputation method");
  }
  grid.points();
  const double beta = c.model.beta;
  std::atomic<std::int64_t> covered{0};
  const auto start = Clock::now();
  parallel_for(c.replications, c.workers, [&](std::int64_t r) {
    Rng rng = child_stream(c.seed, static_cast<std::uint64_t>(r), StreamPurpose::Generator);
    const SimDataset data = generate(c.model, rng);
    const std::uint64_t seed = derive_seed(c.seed, static_cast<std::uint64_t>(r), StreamPurpose::Replication);
    InferenceSpec spec = method_spec(method, data.masked, c.runs, seed, c.side);
    spec.workers = 1;
    const ConfidenceResult ci = confidence_interval(spec, data.masked, EffectModel::additive(), c.alpha, grid);
    const double tol = 1e-9 * std::max(1.0, std::abs(beta));
    if (ci.hull && ci.hull->first <= beta + tol && beta - tol <= ci.hull->second) ++covered;
  });
  SimReport report{c, {}};
  report.rows.push_back(make_row(to_string(method), beta, "coverage", covered.load(), c.replications,
                                 seconds_since(start)));
  return report;
}

std::string_view to_string(SimMethod method) {
  switch (method) {
    case SimMethod::Median: return "median";
    case SimMethod::Algo1Linear: return "algo1-linear";
    case SimMethod::Algo1Boosting: return "algo1-boosting";
    case SimMethod::Algo2Linear: return "algo2-linear";
    case SimMethod::Algo2Boosting: return "algo2-boosting";
    case SimMethod::Oracle: return "oracle";
    case SimMethod::OneShotLinear: return "one-shot-linear";
  }
  return "unknown";
}

SimMethod parse_sim_method(std::string_view name) {
  for (auto m : {SimMethod::Median, SimMethod::Algo1Linear, SimMethod::Algo1Boosting,
                 SimMethod::Algo2Linear, SimMethod::Algo2Boosting, SimMethod::Oracle,
                 SimMethod::OneShotLinear}) {
    if (name == to_string(m)) return m;
  }
  throw std::invalid_argument("unknown simulation method '" + std::string(name) + "'");
}

std::string_view to_string(MissingnessMode mode) {
  return mode == MissingnessMode::OutcomeDependent ? "outcome-dependent" : "covariate-only";
}

MissingnessMode parse_missingness_mode(std::string_view name) {
  if (name == "outcome-dependent") return MissingnessMode::OutcomeDependent;
  if (name == "covariate-only") return MissingnessMode::CovariateOnly;
  throw std::invalid_argument("unknown missingness mode '" + std::string(name) + "'");
}

}  // namespace reimpute
