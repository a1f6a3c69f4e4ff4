#include "cli.hpp"

#include "reimpute/confidence.hpp"
#include "reimpute/csv_io.hpp"
#include "reimpute/errors.hpp"
#include "reimpute/inference.hpp"
#include "reimpute/report_io.hpp"
#include "reimpute/simulation.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace reimpute::cli {
namespace {

constexpr int kExitRunFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitRefusal = 4;

// Thrown for invalid option combinations found after parsing.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataOptions {
  std::string input;
  std::string treatment_col = "z";
  std::vector<std::string> outcome_cols;
  std::vector<std::string> covariate_cols;
  std::string group_col;
  std::string group_kind = "strata";
  std::string na_token = "NA";
};

struct EngineOptions {
  std::string design = "complete";
  double p_treat = 0.5;
  std::string imputer = "median";
  std::string regressor = "ridge";
  double ridge_lambda = 1.0;
  int max_iter = 3;
  std::string adjuster = "none";
  std::string statistic = "permutational-t";
  std::vector<double> weights;
  bool per_outcome = false;
  std::string side = "greater";
  std::int64_t runs = 10'000;
  std::uint64_t seed = 0;
  std::string mode = "monte-carlo";
  bool conservative = false;
  std::uint64_t enumeration_cap = kDefaultEnumerationCap;
  int workers = 1;
  std::string out;
};

struct CiOptions {
  double alpha = 0.05;
  std::string grid = "-1:4:0.05";
  std::string effect = "additive";
  bool covariate_only_missingness = false;
};

struct SimOptions {
  int model = 1;
  std::vector<double> betas{0.0};
  Index n = 50;
  double missing_rate = 0.5;
  std::string missingness = "outcome-dependent";
  std::vector<std::string> methods{"median", "algo1-linear", "algo2-linear"};
  std::string study = "validity";
  std::int64_t replications = 500;
  std::int64_t runs = 300;
  double alpha = 0.05;
  std::string side = "greater";
  std::uint64_t seed = 0;
  int workers = 1;
  std::string grid = "-2:4:0.1";
  std::string out;
};

void add_data_options(CLI::App* app, DataOptions& d) {
  app->add_option("--input", d.input, "CSV file with a header row")->required()->check(CLI::ExistingFile);
  app->add_option("--treatment-col", d.treatment_col, "0/1 treatment column")->capture_default_str();
  app->add_option("--outcome-cols", d.outcome_cols, "Outcome columns")->required()->delimiter(',');
  app->add_option("--covariate-cols", d.covariate_cols, "Covariate columns")->delimiter(',');
  app->add_option("--group-col", d.group_col, "Stratum, pair or cluster column");
  app->add_option("--group-kind", d.group_kind, "strata or clusters")
      ->check(CLI::IsMember({"strata", "clusters"}))
      ->capture_default_str();
  app->add_option("--na-token", d.na_token, "Missing-value token")->capture_default_str();
}

void add_engine_options(CLI::App* app, EngineOptions& e) {
  app->add_option("--design", e.design, "complete, stratified, paired, bernoulli or cluster")
      ->capture_default_str();
  app->add_option("--p-treat", e.p_treat, "Bernoulli treatment probability")->capture_default_str();
  app->add_option("--imputer", e.imputer, "arm-mean, median, stochastic-median or chained")
      ->capture_default_str();
  app->add_option("--regressor", e.regressor, "Chained-equations model: ridge or gbt")
      ->capture_default_str();
  app->add_option("--ridge-lambda", e.ridge_lambda, "Ridge penalty")->capture_default_str();
  app->add_option("--max-iter", e.max_iter, "Chained-equations sweeps")->capture_default_str();
  app->add_option("--adjuster", e.adjuster, "Covariate adjustment: none, ridge, gbt or zero")
      ->capture_default_str();
  app->add_option("--statistic", e.statistic,
                  "permutational-t, wilcoxon, adjusted-wilcoxon or missingness-count")
      ->capture_default_str();
  app->add_option("--weights", e.weights, "Per-outcome weights for a combined statistic")->delimiter(',');
  app->add_flag("--per-outcome", e.per_outcome, "One test per outcome with Holm adjustment");
  app->add_option("--side", e.side, "greater, less or two-sided")->capture_default_str();
  app->add_option("-L,--runs", e.runs, "Re-imputation runs")->capture_default_str();
  app->add_option("--seed", e.seed, "Master seed")->capture_default_str();
  app->add_option("--mode", e.mode, "monte-carlo or exact")->capture_default_str();
  app->add_flag("--conservative", e.conservative, "Report (1 + count) / (1 + L)");
  app->add_option("--enumeration-cap", e.enumeration_cap, "Largest support to enumerate")
      ->capture_default_str();
  app->add_option("--workers", e.workers, "Worker threads (0 = hardware)")->capture_default_str();
  app->add_option("--out", e.out, "Output path prefix");
}

Dataset load(const DataOptions& d) {
  CsvSchema schema;
  schema.treatment = d.treatment_col;
  schema.outcomes = d.outcome_cols;
  schema.covariates = d.covariate_cols;
  schema.group = d.group_col;
  schema.group_kind = d.group_kind == "clusters" ? GroupStructure::Kind::Clusters
                                                 : GroupStructure::Kind::Strata;
  schema.na_token = d.na_token;
  return load_csv(d.input, schema);
}

int resolve_workers(int w) {
  if (w < 0) throw ConfigError("--workers must be >= 0");
  if (w == 0) return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return w;
}

// Parses config strings that only depend on the options themselves.
template <class F>
auto config_value(F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

InferenceSpec build_spec(const EngineOptions& e, const Dataset& data) {
  const Design::Kind kind = config_value([&] { return parse_design_kind(e.design); });
  const bool grouped = kind == Design::Kind::Stratified || kind == Design::Kind::Paired ||
                       kind == Design::Kind::ClusterComplete;
  if (grouped && data.groups().kind() == GroupStructure::Kind::None) {
    throw ConfigError("design '" + e.design + "' needs --group-col");
  }
  std::optional<Design> design;
  try {
    design = Design::from_observed(kind, data, e.p_treat);
  } catch (const std::invalid_argument& ex) {
    throw DataError(std::string("design does not fit the data: ") + ex.what());
  }
  InferenceSpec spec(*design);

  config_value([&] {
    RegressorSpec reg;
    reg.kind = parse_regressor_kind(e.regressor);
    reg.ridge_lambda = e.ridge_lambda;
    if (e.max_iter < 1) throw std::invalid_argument("--max-iter must be >= 1");
    if (!(e.ridge_lambda >= 0.0)) throw std::invalid_argument("--ridge-lambda must be >= 0");
    spec.imputer.kind = parse_imputer_kind(e.imputer);
    spec.imputer.regressor = reg;
    spec.imputer.max_iter = e.max_iter;
    if (e.adjuster != "none") {
      RegressorSpec adj;
      adj.kind = parse_regressor_kind(e.adjuster);
      adj.ridge_lambda = e.ridge_lambda;
      spec.adjuster = adj;
    }
    const auto stat = parse_statistic_kind(e.statistic);
    const MaskArray& mask = data.y().mask();
    if (!e.weights.empty()) {
      if (static_cast<Index>(e.weights.size()) != data.outcomes()) {
        throw std::invalid_argument("--weights needs one weight per outcome");
      }
      spec.statistic = TestStatistic::linear_combination(
          stat, e.weights,
          stat == TestStatistic::Kind::AdjustedWilcoxon ? std::make_shared<const MaskArray>(mask) : nullptr);
    } else if (stat == TestStatistic::Kind::AdjustedWilcoxon) {
      spec.statistic = TestStatistic::adjusted_wilcoxon(mask);
    } else if (stat == TestStatistic::Kind::MissingnessCount) {
      spec.statistic = TestStatistic::missingness_count(mask);
    } else if (stat == TestStatistic::Kind::WilcoxonRankSum) {
      spec.statistic = TestStatistic::wilcoxon();
    }
    if (e.per_outcome && !e.weights.empty()) {
      throw std::invalid_argument("--per-outcome and --weights are exclusive");
    }
    if (data.outcomes() > 1 && !e.per_outcome && e.weights.empty() &&
        stat != TestStatistic::Kind::MissingnessCount) {
      throw std::invalid_argument("several outcomes need --per-outcome or --weights");
    }
    spec.per_outcome = e.per_outcome;
    spec.side = parse_side(e.side);
    spec.mode = parse_mode(e.mode);
    if (e.runs < 1) throw std::invalid_argument("-L must be >= 1");
    spec.runs = e.runs;
    spec.seed = e.seed;
    spec.conservative = e.conservative;
    spec.enumeration_cap = e.enumeration_cap;
    return 0;
  });
  spec.workers = resolve_workers(e.workers);
  return spec;
}

Grid parse_grid(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--grid expects lo:hi:step, got '" + text + "'");
    }
  }
  if (parts.size() != 3) throw ConfigError("--grid expects lo:hi:step, got '" + text + "'");
  Grid g{parts[0], parts[1], parts[2]};
  config_value([&] { return g.points().size(); });
  return g;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << text;
}

template <class Writer>
void write_csv_file(const std::string& path, Writer&& writer) {
  std::ostringstream buf;
  writer(buf);
  write_file(path, buf.str());
}

std::string resolved(const CLI::App* sub) { return sub->config_to_str(true, false); }

int cmd_test(const CLI::App* sub, const DataOptions& d, const EngineOptions& e, std::ostream& out) {
  const Dataset data = load(d);
  const InferenceSpec spec = build_spec(e, data);
  const InferenceResult r = run_test(spec, data);
  const std::string config = resolved(sub);
  out << std::setprecision(10);
  out << "p_hat: " << r.p_hat << '\n';
  if (r.components.size() == 1 && r.components.front().exact) {
    const Fraction& f = *r.components.front().exact;
    out << "exact: " << f.numerator << '/' << f.denominator << '\n';
  }
  out << "t_obs: " << r.components.front().t_obs << '\n';
  for (std::size_t k = 0; k < r.holm_adjusted.size(); ++k) {
    out << "outcome " << d.outcome_cols[k] << ": p_hat " << r.components[k].p_hat << ", holm "
        << r.holm_adjusted[k] << '\n';
  }
  out << "runs: " << r.runs << " (" << to_string(r.mode) << ", seed " << r.seed << ")\n";
  out << "hoeffding_half_width(delta=0.05): " << r.hoeffding_half_width(0.05) << '\n';
  if (!e.out.empty()) {
    write_file(e.out + ".json", inference_json(r, config));
    write_csv_file(e.out + "_draws.csv", [&](std::ostream& o) { write_draws_csv(o, r, config); });
  }
  return 0;
}

int cmd_ci(const CLI::App* sub, const DataOptions& d, const EngineOptions& e, const CiOptions& c,
           std::ostream& out, std::ostream& err) {
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw ConfigError("--alpha must lie in (0, 1)");
  const Grid grid = parse_grid(c.grid);
  const EffectModel model{config_value([&] { return parse_effect_kind(c.effect); }), {}, {}};
  const Dataset data = load(d);
  const InferenceSpec spec = build_spec(e, data);
  const ConfidenceResult r = confidence_interval(spec, data, model, c.alpha, grid);
  const std::string config = resolved(sub);
  if (!c.covariate_only_missingness) err << "warning: " << r.warning << '\n';
  out << std::setprecision(10);
  out << "grid points: " << r.grid.size() << ", retained: " << r.region.size() << '\n';
  if (r.hull) {
    out << "hull: [" << r.hull->first << ", " << r.hull->second << "]"
        << (r.contiguous ? "" : " (region is not contiguous)") << '\n';
  } else {
    out << "hull: empty\n";
  }
  if (!e.out.empty()) {
    write_file(e.out + ".json", confidence_json(r, config));
    write_csv_file(e.out + "_grid.csv", [&](std::ostream& o) { write_grid_csv(o, r, config); });
  }
  return 0;
}

int cmd_simulate(const CLI::App* sub, const SimOptions& s, std::ostream& out) {
  StudyConfig cfg;
  config_value([&] {
    cfg.model.id = s.model;
    cfg.model.n = s.n;
    cfg.model.missing_rate = s.missing_rate;
    cfg.model.missingness = parse_missingness_mode(s.missingness);
    for (const auto& m : s.methods) cfg.methods.push_back(parse_sim_method(m));
    cfg.side = parse_side(s.side);
    if (s.model < 1 || s.model > 6) throw std::invalid_argument("--model must be 1..6");
    if (s.n < 10 || s.n % 10 != 0) throw std::invalid_argument("--n must be a positive multiple of 10");
    if (!(s.missing_rate > 0.0 && s.missing_rate < 1.0)) throw std::invalid_argument("--missing-rate must lie in (0, 1)");
    if (s.replications < 1) throw std::invalid_argument("-R must be >= 1");
    if (s.runs < 1) throw std::invalid_argument("-L must be >= 1");
    if (!(s.alpha > 0.0 && s.alpha <= 1.0)) throw std::invalid_argument("--alpha must lie in (0, 1]");
    if (s.betas.empty()) throw std::invalid_argument("--beta needs at least one value");
    return 0;
  });
  cfg.replications = s.replications;
  cfg.runs = s.runs;
  cfg.alpha = s.alpha;
  cfg.seed = s.seed;
  cfg.workers = resolve_workers(s.workers);

  SimReport report;
  if (s.study == "validity") {
    report = run_validity_study(cfg);
  } else if (s.study == "power") {
    report = run_power_study(cfg, s.betas);
  } else {
    if (cfg.methods.size() != 1) throw ConfigError("coverage study takes exactly one method");
    const Grid grid = parse_grid(s.grid);
    cfg.model.beta = s.betas.front();
    report = run_coverage_study(cfg, cfg.methods.front(), grid);
  }
  const std::string config = resolved(sub);
  out << std::setprecision(6);
  for (const auto& row : report.rows) {
    out << row.method << " beta=" << row.beta << ' ' << row.metric << " rate " << row.rate << " (se "
        << row.se << ", " << row.successes << '/' << row.replications << ")\n";
  }
  if (!s.out.empty()) {
    write_file(s.out + ".json", simulation_json(report, config));
    write_csv_file(s.out + ".csv", [&](std::ostream& o) { write_simulation_csv(o, report, config); });
  }
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Randomization tests with missing outcomes by imputation and re-imputation", "reimpute"};
  app.set_config("--config", "", "TOML/INI config file; command-line flags take precedence");
  app.require_subcommand(1);

  DataOptions test_data, ci_data;
  EngineOptions test_engine, ci_engine;
  ci_engine.side = "two-sided";
  CiOptions ci;
  SimOptions sim;

  CLI::App* test = app.add_subcommand("test", "Test Fisher's sharp null on a dataset");
  add_data_options(test, test_data);
  add_engine_options(test, test_engine);

  CLI::App* ci_cmd = app.add_subcommand("ci", "Confidence region for an effect by test inversion");
  add_data_options(ci_cmd, ci_data);
  add_engine_options(ci_cmd, ci_engine);
  ci_cmd->add_option("--alpha", ci.alpha, "Level")->capture_default_str();
  ci_cmd->add_option("--grid", ci.grid, "lo:hi:step")->capture_default_str();
  ci_cmd->add_option("--effect", ci.effect, "additive or multiplicative")->capture_default_str();
  ci_cmd->add_flag("--covariate-only-missingness", ci.covariate_only_missingness,
                   "Assert missingness depends on covariates only (silences the warning)");

  CLI::App* simulate = app.add_subcommand("simulate", "Simulation study on generated datasets");
  simulate->add_option("--model", sim.model, "Generator 1..6")->capture_default_str();
  simulate->add_option("--beta", sim.betas, "Effect sizes")->delimiter(',')->capture_default_str();
  simulate->add_option("--n", sim.n, "Units (multiple of 10)")->capture_default_str();
  simulate->add_option("--missing-rate", sim.missing_rate, "Missing share per outcome")->capture_default_str();
  simulate->add_option("--missingness", sim.missingness, "outcome-dependent or covariate-only")
      ->capture_default_str();
  simulate->add_option("--methods", sim.methods, "Methods to compare")->delimiter(',')->capture_default_str();
  simulate->add_option("--study", sim.study, "validity, power or coverage")
      ->check(CLI::IsMember({"validity", "power", "coverage"}))
      ->capture_default_str();
  simulate->add_option("-R,--replications", sim.replications, "Generated datasets")->capture_default_str();
  simulate->add_option("-L,--runs", sim.runs, "Re-imputation runs per test")->capture_default_str();
  simulate->add_option("--alpha", sim.alpha, "Level")->capture_default_str();
  simulate->add_option("--side", sim.side, "greater, less or two-sided")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
  simulate->add_option("--workers", sim.workers, "Worker threads (0 = hardware)")->capture_default_str();
  simulate->add_option("--grid", sim.grid, "Coverage grid lo:hi:step")->capture_default_str();
  simulate->add_option("--out", sim.out, "Output path prefix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  try {
    if (test->parsed()) return cmd_test(test, test_data, test_engine, out);
    if (ci_cmd->parsed()) return cmd_ci(ci_cmd, ci_data, ci_engine, ci, out, err);
    return cmd_simulate(simulate, sim, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const RefusalError& e) {
    err << "refused: " << e.what() << '\n';
    return kExitRefusal;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRunFailure;
  }
}

}  // namespace reimpute::cli
