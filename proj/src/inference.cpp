#include "reimpute/inference.hpp"

#include "reimpute/errors.hpp"
#include "reimpute/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace reimpute {

bool at_least(double value, double threshold) noexcept {
  return value >= threshold - 1e-9 * std::max(1.0, std::abs(threshold));
}

bool at_most(double value, double threshold) noexcept {
  return value <= threshold + 1e-9 * std::max(1.0, std::abs(threshold));
}

double sided_p_value(Side side, double p_greater, double p_less) {
  switch (side) {
    case Side::Greater: return p_greater;
    case Side::Less: return p_less;
    case Side::TwoSided: return std::min(1.0, 2.0 * std::min(p_greater, p_less));
  }
  return p_greater;
}

double InferenceResult::hoeffding_half_width(double delta) const {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("hoeffding_half_width: delta must lie in (0, 1)");
  }
  if (mode == Mode::ExactEnumeration) return 0.0;
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(runs)));
}

std::int64_t required_runs(double eps, double delta) {
  if (!(eps > 0.0)) throw std::invalid_argument("required_runs: eps must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("required_runs: delta must lie in (0, 1)");
  const double l = std::log(2.0 / delta) / (2.0 * eps * eps);
  // Absorb rounding when l is an integer in exact arithmetic.
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(l - 1e-9 * std::max(1.0, l))));
}

double hoeffding_bound(std::int64_t runs, double eps) {
  return 2.0 * std::exp(-2.0 * static_cast<double>(runs) * eps * eps);
}

HolmResult holm_bonferroni(std::span<const double> pvals, double alpha) {
  if (pvals.empty()) throw std::invalid_argument("holm_bonferroni: no p-values");
  for (double p : pvals) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("holm_bonferroni: p-values must lie in [0, 1]");
  }
  const std::size_t k = pvals.size();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pvals[a] < pvals[b]; });
  HolmResult out{std::vector<double>(k), std::vector<bool>(k, false)};
  double running = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double adj = std::min(1.0, static_cast<double>(k - i) * pvals[order[i]]);
    running = std::max(running, adj);
    out.adjusted[order[i]] = running;
  }
  for (std::size_t i = 0; i < k; ++i) out.rejected[i] = out.adjusted[i] <= alpha;
  return out;
}

namespace {

// Covariates with missing cells replaced by their observed column mean;
// the adjustment model needs complete features.
Eigen::MatrixXd mean_filled(const MaskedMatrix& x) {
  Eigen::MatrixXd out = x.raw_values();
  for (Index c = 0; c < x.cols(); ++c) {
    const auto obs = x.observed(c);
    const double mean =
        obs.empty() ? 0.0 : std::accumulate(obs.begin(), obs.end(), 0.0) / static_cast<double>(obs.size());
    for (Index r = 0; r < x.rows(); ++r) {
      if (x.missing(r, c)) out(r, c) = mean;
    }
  }
  return out;
}

// Statistic values for one assignment: impute, optionally adjust, evaluate.
class Evaluator {
 public:
  Evaluator(const InferenceSpec& spec, const Dataset& data, bool adjust,
            std::optional<FrozenImputation> frozen)
      : spec_(spec), data_(data), adjust_(adjust), frozen_(std::move(frozen)) {
    if (adjust_) x_filled_ = mean_filled(data.x());
    components_ = spec.per_outcome ? static_cast<std::size_t>(data.outcomes()) : 1;
  }

  std::size_t components() const { return components_; }

  void operator()(const TreatmentVector& z, Rng& rng, double* out) const {
    Eigen::MatrixXd values = frozen_ ? frozen_->apply(z, rng)
                                     : impute(spec_.imputer, z, data_.x(), data_.y(), rng);
    if (adjust_) {
      for (Index k = 0; k < values.cols(); ++k) {
        const Eigen::VectorXd col = values.col(k);
        const FittedRegressor h = fit_regressor(*spec_.adjuster, x_filled_, col);
        values.col(k) -= h.predict(x_filled_);
      }
    }
    if (spec_.per_outcome) {
      for (std::size_t k = 0; k < components_; ++k) {
        out[k] = spec_.statistic.for_outcome(static_cast<Index>(k)).evaluate(z, values);
      }
    } else {
      out[0] = spec_.statistic.evaluate(z, values);
    }
  }

 private:
  const InferenceSpec& spec_;
  const Dataset& data_;
  bool adjust_;
  std::optional<FrozenImputation> frozen_;
  Eigen::MatrixXd x_filled_;
  std::size_t components_ = 1;
};

void validate(const InferenceSpec& spec, const Dataset& data, bool adjust) {
  if (spec.design.units() != data.units()) {
    throw std::invalid_argument("design covers " + std::to_string(spec.design.units()) +
                                " units but the dataset has " + std::to_string(data.units()));
  }
  spec.design.validate_observed(data.z());
  if (adjust && !spec.adjuster) {
    throw std::invalid_argument("covariate adjustment requested without an adjuster");
  }
  if (spec.mode == Mode::MonteCarlo && spec.runs < 1) {
    throw std::invalid_argument("number of re-imputation runs must be >= 1");
  }
  if (spec.mode == Mode::ExactEnumeration && !spec.imputer.deterministic()) {
    throw RefusalError("exact enumeration requires a deterministic imputer; '" +
                       std::string(to_string(spec.imputer.kind)) + "' is stochastic");
  }
}

InferenceResult run_engine(const InferenceSpec& spec, const Dataset& data, bool adjust,
                           bool one_shot) {
  validate(spec, data, adjust);
  std::optional<FrozenImputation> frozen;
  if (one_shot) frozen = freeze_imputation(spec.imputer, data.z(), data.x(), data.y());
  const Evaluator eval(spec, data, adjust, std::move(frozen));
  const std::size_t s = eval.components();

  InferenceResult result;
  result.mode = spec.mode;
  result.side = spec.side;
  result.seed = spec.seed;
  result.conservative = spec.conservative;
  result.covariate_adjusted = adjust;
  result.one_shot = one_shot;
  result.input_checksum = data.checksum();

  std::vector<double> t_obs(s);
  {
    Rng rng = child_stream(spec.seed, 0, StreamPurpose::Imputation);
    eval(data.z(), rng, t_obs.data());
  }

  std::atomic<std::int64_t> mismatches{0};
  const auto audit = [&] {
    if (spec.audit_inputs && data.checksum() != result.input_checksum) ++mismatches;
  };
  const auto run_body = [&](const TreatmentVector& z, std::int64_t index, double* out) {
    audit();
    Rng rng = child_stream(spec.seed, static_cast<std::uint64_t>(index), StreamPurpose::Imputation);
    try {
      eval(z, rng, out);
    } catch (const FitError& e) {
      throw FitError("run " + std::to_string(index) + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw FitError("run " + std::to_string(index) + ": " + e.what());
    }
  };

  std::vector<double> draws;
  if (spec.mode == Mode::ExactEnumeration) {
    std::vector<WeightedAssignment> support = spec.design.enumerate(spec.enumeration_cap);
    const auto n = static_cast<std::int64_t>(support.size());
    draws.assign(static_cast<std::size_t>(n) * s, 0.0);
    parallel_for(n, spec.workers, [&](std::int64_t i) {
      run_body(support[static_cast<std::size_t>(i)].z, i + 1, &draws[static_cast<std::size_t>(i) * s]);
    });
    result.runs = n;
    for (std::size_t c = 0; c < s; ++c) {
      ComponentResult comp;
      comp.t_obs = t_obs[c];
      double pg = 0.0, pl = 0.0;
      for (std::int64_t i = 0; i < n; ++i) {
        const double v = draws[static_cast<std::size_t>(i) * s + c];
        const double w = support[static_cast<std::size_t>(i)].probability;
        if (at_least(v, comp.t_obs)) { pg += w; ++comp.count_ge; }
        if (at_most(v, comp.t_obs)) { pl += w; ++comp.count_le; }
      }
      comp.p_greater = std::min(1.0, pg);
      comp.p_less = std::min(1.0, pl);
      if (spec.design.is_uniform()) {
        // Probabilities are 1/|support|: count exactly instead of summing.
        const auto den = static_cast<std::uint64_t>(n);
        auto make = [&](std::uint64_t num) {
          num = std::min(num, den);
          const std::uint64_t g = std::gcd(num, den);
          return Fraction{g ? num / g : 0, g ? den / g : 1};
        };
        const auto ge = static_cast<std::uint64_t>(comp.count_ge);
        const auto le = static_cast<std::uint64_t>(comp.count_le);
        Fraction f = spec.side == Side::Greater ? make(ge)
                     : spec.side == Side::Less  ? make(le)
                                                : make(2 * std::min(ge, le));
        comp.exact = f;
        comp.p_greater = make(ge).value();
        comp.p_less = make(le).value();
      }
      comp.p_hat = comp.exact ? comp.exact->value()
                              : sided_p_value(spec.side, comp.p_greater, comp.p_less);
      result.components.push_back(comp);
    }
    for (auto& wa : support) {
      result.draw_weights.push_back(wa.probability);
      result.assignments.push_back(std::move(wa.z));
    }
  } else {
    const std::int64_t L = spec.runs;
    draws.assign(static_cast<std::size_t>(L) * s, 0.0);
    parallel_for(L, spec.workers, [&](std::int64_t i) {
      const std::int64_t l = i + 1;
      Rng design_rng = child_stream(spec.seed, static_cast<std::uint64_t>(l), StreamPurpose::Design);
      const TreatmentVector z = spec.design.sample(design_rng);
      run_body(z, l, &draws[static_cast<std::size_t>(i) * s]);
    });
    result.runs = L;
    const double denom = static_cast<double>(L) + (spec.conservative ? 1.0 : 0.0);
    const double extra = spec.conservative ? 1.0 : 0.0;
    for (std::size_t c = 0; c < s; ++c) {
      ComponentResult comp;
      comp.t_obs = t_obs[c];
      for (std::int64_t i = 0; i < L; ++i) {
        const double v = draws[static_cast<std::size_t>(i) * s + c];
        if (at_least(v, comp.t_obs)) ++comp.count_ge;
        if (at_most(v, comp.t_obs)) ++comp.count_le;
      }
      comp.p_greater = (static_cast<double>(comp.count_ge) + extra) / denom;
      comp.p_less = (static_cast<double>(comp.count_le) + extra) / denom;
      comp.p_hat = sided_p_value(spec.side, comp.p_greater, comp.p_less);
      result.components.push_back(comp);
    }
  }

  if (spec.per_outcome) {
    std::vector<double> ps;
    for (const auto& c : result.components) ps.push_back(c.p_hat);
    result.holm_adjusted = holm_bonferroni(ps).adjusted;
    result.p_hat = *std::min_element(result.holm_adjusted.begin(), result.holm_adjusted.end());
  } else {
    result.p_hat = result.components.front().p_hat;
  }
  result.audit_mismatches = mismatches.load();
  if (spec.keep_draws) result.draws = std::move(draws);
  return result;
}

}  // namespace

InferenceResult run_algorithm1(const InferenceSpec& spec, const Dataset& data) {
  return run_engine(spec, data, false, false);
}

InferenceResult run_algorithm2(const InferenceSpec& spec, const Dataset& data) {
  return run_engine(spec, data, true, false);
}

InferenceResult run_test(const InferenceSpec& spec, const Dataset& data) {
  return spec.adjuster ? run_algorithm2(spec, data) : run_algorithm1(spec, data);
}

InferenceResult run_one_shot_comparator(const InferenceSpec& spec, const Dataset& data) {
  return run_engine(spec, data, spec.adjuster.has_value(), true);
}

std::string_view to_string(Side side) {
  switch (side) {
    case Side::Greater: return "greater";
    case Side::Less: return "less";
    case Side::TwoSided: return "two-sided";
  }
  return "unknown";
}

Side parse_side(std::string_view name) {
  if (name == "greater") return Side::Greater;
  if (name == "less") return Side::Less;
  if (name == "two-sided") return Side::TwoSided;
  throw std::invalid_argument("unknown side '" + std::string(name) + "'");
}

std::string_view to_string(Mode mode) {
  return mode == Mode::MonteCarlo ? "monte-carlo" : "exact";
}

Mode parse_mode(std::string_view name) {
  if (name == "monte-carlo" || name == "mc") return Mode::MonteCarlo;
  if (name == "exact") return Mode::ExactEnumeration;
  throw std::invalid_argument("unknown mode '" + std::string(name) + "'");
}

}  // namespace reimpute
