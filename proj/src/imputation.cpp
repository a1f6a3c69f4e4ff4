#include "reimpute/imputation.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace reimpute {

double median_of(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return lower + (upper - lower) / 2.0;
}

namespace {

void check_shapes(const TreatmentVector& z, const MaskedMatrix& x, const MaskedMatrix& y) {
  if (static_cast<Index>(z.size()) != y.rows() || x.rows() != y.rows()) {
    throw std::invalid_argument("impute: Z, X* and Y* disagree on the number of units");
  }
}

struct ArmFill {
  double treated;
  double control;
};

ArmFill arm_fill(const TreatmentVector& z, const MaskedMatrix& y, Index k) {
  double sums[2] = {0.0, 0.0};
  Index counts[2] = {0, 0};
  double lo = INFINITY, hi = -INFINITY;
  for (Index r = 0; r < y.rows(); ++r) {
    if (auto v = y.cell(r, k)) {
      const int arm = z.treated(static_cast<std::size_t>(r)) ? 1 : 0;
      sums[arm] += *v;
      ++counts[arm];
      lo = std::min(lo, *v);
      hi = std::max(hi, *v);
    }
  }
  const double midpoint = counts[0] + counts[1] > 0 ? lo + (hi - lo) / 2.0 : 0.0;
  auto mean = [&](int arm) {
    return counts[arm] > 0 ? sums[arm] / static_cast<double>(counts[arm]) : midpoint;
  };
  return {mean(1), mean(0)};
}

struct MedianFill {
  double median;
  double sd;
};

MedianFill median_fill(const MaskedMatrix& y, Index k) {
  std::vector<double> obs = y.observed(k);
  MedianFill out{median_of(obs), 0.0};
  if (obs.size() >= 2) {
    double mean = 0.0;
    for (double v : obs) mean += v;
    mean /= static_cast<double>(obs.size());
    double ss = 0.0;
    for (double v : obs) ss += (v - mean) * (v - mean);
    out.sd = std::sqrt(ss / static_cast<double>(obs.size() - 1));
  }
  return out;
}

Eigen::MatrixXd fill_from(const MaskedMatrix& y) {
  Eigen::MatrixXd out = y.raw_values();
  return out;
}

void fill_stochastic(Eigen::MatrixXd& out, const MaskedMatrix& y,
                     const std::vector<MedianFill>& fills, Rng& rng) {
  for (Index k = 0; k < y.cols(); ++k) {
    const auto& f = fills[static_cast<std::size_t>(k)];
    std::normal_distribution<double> draw(f.median, f.sd > 0.0 ? f.sd : 1.0);
    for (Index r = 0; r < y.rows(); ++r) {
      if (y.missing(r, k)) out(r, k) = f.sd > 0.0 ? draw(rng) : f.median;
    }
  }
}

// Working state of the chained-equations sweep over [X | Y].
struct ChainedLayout {
  Eigen::MatrixXd work;        // N x (p + K), missing cells pre-filled
  MaskArray mask;              // N x (p + K)
  std::vector<Index> targets;  // incomplete columns in visit order
};

ChainedLayout chained_layout(const MaskedMatrix& x, const MaskedMatrix& y) {
  const Index n = y.rows();
  const Index p = x.cols();
  const Index q = p + y.cols();
  ChainedLayout s;
  s.work.resize(n, q);
  s.mask.resize(n, q);
  for (Index c = 0; c < q; ++c) {
    const MaskedMatrix& src = c < p ? x : y;
    const Index sc = c < p ? c : c - p;
    double sum = 0.0;
    Index count = 0;
    for (Index r = 0; r < n; ++r) {
      if (auto v = src.cell(r, sc)) {
        sum += *v;
        ++count;
      }
    }
    const double fill = count > 0 ? sum / static_cast<double>(count) : 0.0;
    for (Index r = 0; r < n; ++r) {
      const bool miss = src.missing(r, sc);
      s.mask(r, c) = miss;
      s.work(r, c) = miss ? fill : src.raw_values()(r, sc);
    }
    if (count < n) s.targets.push_back(c);
  }
  return s;
}

// Features for column c: Z followed by every other column of work.
Eigen::MatrixXd features_for(const Eigen::MatrixXd& work, const TreatmentVector& z, Index c) {
  const Index n = work.rows();
  const Index q = work.cols();
  Eigen::MatrixXd f(n, q);
  for (Index r = 0; r < n; ++r) f(r, 0) = z[static_cast<std::size_t>(r)];
  if (c > 0) f.block(0, 1, n, c) = work.leftCols(c);
  if (c + 1 < q) f.block(0, c + 1, n, q - c - 1) = work.rightCols(q - c - 1);
  return f;
}

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& m, const std::vector<Index>& rows) {
  Eigen::MatrixXd out(static_cast<Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = m.row(rows[i]);
  return out;
}

// One sweep step for column c. Returns the fitted model, or nullopt when the
// column has no observed rows to learn from.
std::optional<FittedRegressor> chained_step(ChainedLayout& s, const TreatmentVector& z,
                                            const RegressorSpec& regressor, Index c) {
  std::vector<Index> observed_rows, missing_rows;
  for (Index r = 0; r < s.work.rows(); ++r) {
    (s.mask(r, c) ? missing_rows : observed_rows).push_back(r);
  }
  if (observed_rows.empty()) return std::nullopt;
  const Eigen::MatrixXd f = features_for(s.work, z, c);
  Eigen::VectorXd target(static_cast<Index>(observed_rows.size()));
  for (std::size_t i = 0; i < observed_rows.size(); ++i) {
    target(static_cast<Index>(i)) = s.work(observed_rows[i], c);
  }
  FittedRegressor model = fit_regressor(regressor, select_rows(f, observed_rows), target);
  const Eigen::VectorXd pred = model.predict(select_rows(f, missing_rows));
  for (std::size_t i = 0; i < missing_rows.size(); ++i) {
    s.work(missing_rows[i], c) = pred(static_cast<Index>(i));
  }
  return model;
}

void apply_frozen_step(ChainedLayout& s, const TreatmentVector& z,
                       const FittedRegressor& model, Index c) {
  std::vector<Index> missing_rows;
  for (Index r = 0; r < s.work.rows(); ++r) {
    if (s.mask(r, c)) missing_rows.push_back(r);
  }
  const Eigen::MatrixXd f = features_for(s.work, z, c);
  const Eigen::VectorXd pred = model.predict(select_rows(f, missing_rows));
  for (std::size_t i = 0; i < missing_rows.size(); ++i) {
    s.work(missing_rows[i], c) = pred(static_cast<Index>(i));
  }
}

}  // namespace

Eigen::MatrixXd chained_impute(const RegressorSpec& regressor, int max_iter,
                               const TreatmentVector& z, const MaskedMatrix& x,
                               const MaskedMatrix& y) {
  check_shapes(z, x, y);
  ChainedLayout s = chained_layout(x, y);
  for (int it = 0; it < max_iter && !s.targets.empty(); ++it) {
    for (Index c : s.targets) chained_step(s, z, regressor, c);
  }
  return s.work;
}

Eigen::MatrixXd impute(const ImputerSpec& spec, const TreatmentVector& z,
                       const MaskedMatrix& x, const MaskedMatrix& y, Rng& rng) {
  check_shapes(z, x, y);
  Eigen::MatrixXd out = fill_from(y);
  if (!y.any_missing()) return out;

  switch (spec.kind) {
    case ImputerSpec::Kind::ArmMean:
      for (Index k = 0; k < y.cols(); ++k) {
        const ArmFill f = arm_fill(z, y, k);
        for (Index r = 0; r < y.rows(); ++r) {
          if (y.missing(r, k)) out(r, k) = z.treated(static_cast<std::size_t>(r)) ? f.treated : f.control;
        }
      }
      return out;
    case ImputerSpec::Kind::MedianDeterministic:
      for (Index k = 0; k < y.cols(); ++k) {
        const double m = median_of(y.observed(k));
        for (Index r = 0; r < y.rows(); ++r) {
          if (y.missing(r, k)) out(r, k) = m;
        }
      }
      return out;
    case ImputerSpec::Kind::MedianStochastic: {
      std::vector<MedianFill> fills;
      for (Index k = 0; k < y.cols(); ++k) fills.push_back(median_fill(y, k));
      fill_stochastic(out, y, fills, rng);
      return out;
    }
    case ImputerSpec::Kind::ChainedEquations: {
      const Eigen::MatrixXd full = chained_impute(spec.regressor, spec.max_iter, z, x, y);
      // Observed cells are copied from Y*, never from the working matrix.
      for (Index k = 0; k < y.cols(); ++k) {
        for (Index r = 0; r < y.rows(); ++r) {
          if (y.missing(r, k)) out(r, k) = full(r, x.cols() + k);
        }
      }
      return out;
    }
  }
  throw std::invalid_argument("unknown imputer kind");
}

struct FrozenImputation::State {
  ImputerSpec spec;
  MaskedMatrix x;
  MaskedMatrix y;
  std::vector<ArmFill> arm;
  std::vector<MedianFill> median;
  ChainedLayout layout;
  // Per target column, the model from the last sweep on the observed data.
  std::vector<std::optional<FittedRegressor>> models;
};

Eigen::MatrixXd FrozenImputation::apply(const TreatmentVector& z, Rng& rng) const {
  const State& s = *state_;
  check_shapes(z, s.x, s.y);
  Eigen::MatrixXd out = fill_from(s.y);
  switch (s.spec.kind) {
    case ImputerSpec::Kind::ArmMean:
      for (Index k = 0; k < s.y.cols(); ++k) {
        const ArmFill& f = s.arm[static_cast<std::size_t>(k)];
        for (Index r = 0; r < s.y.rows(); ++r) {
          if (s.y.missing(r, k)) out(r, k) = z.treated(static_cast<std::size_t>(r)) ? f.treated : f.control;
        }
      }
      return out;
    case ImputerSpec::Kind::MedianDeterministic:
      for (Index k = 0; k < s.y.cols(); ++k) {
        for (Index r = 0; r < s.y.rows(); ++r) {
          if (s.y.missing(r, k)) out(r, k) = s.median[static_cast<std::size_t>(k)].median;
        }
      }
      return out;
    case ImputerSpec::Kind::MedianStochastic:
      fill_stochastic(out, s.y, s.median, rng);
      return out;
    case ImputerSpec::Kind::ChainedEquations: {
      ChainedLayout work = s.layout;
      for (int it = 0; it < s.spec.max_iter && !work.targets.empty(); ++it) {
        for (std::size_t t = 0; t < work.targets.size(); ++t) {
          if (s.models[t]) apply_frozen_step(work, z, *s.models[t], work.targets[t]);
        }
      }
      for (Index k = 0; k < s.y.cols(); ++k) {
        for (Index r = 0; r < s.y.rows(); ++r) {
          if (s.y.missing(r, k)) out(r, k) = work.work(r, s.x.cols() + k);
        }
      }
      return out;
    }
  }
  throw std::invalid_argument("unknown imputer kind");
}

FrozenImputation freeze_imputation(const ImputerSpec& spec, const TreatmentVector& z,
                                   const MaskedMatrix& x, const MaskedMatrix& y) {
  check_shapes(z, x, y);
  auto state = std::make_shared<FrozenImputation::State>();
  state->spec = spec;
  state->x = x;
  state->y = y;
  for (Index k = 0; k < y.cols(); ++k) {
    state->arm.push_back(arm_fill(z, y, k));
    state->median.push_back(median_fill(y, k));
  }
  if (spec.kind == ImputerSpec::Kind::ChainedEquations) {
    state->layout = chained_layout(x, y);
    ChainedLayout s = state->layout;
    state->models.assign(s.targets.size(), std::nullopt);
    for (int it = 0; it < spec.max_iter; ++it) {
      for (std::size_t t = 0; t < s.targets.size(); ++t) {
        state->models[t] = chained_step(s, z, spec.regressor, s.targets[t]);
      }
    }
  }
  return FrozenImputation(std::move(state));
}

std::string_view to_string(ImputerSpec::Kind kind) {
  switch (kind) {
    case ImputerSpec::Kind::ArmMean: return "arm-mean";
    case ImputerSpec::Kind::MedianDeterministic: return "median";
    case ImputerSpec::Kind::MedianStochastic: return "stochastic-median";
    case ImputerSpec::Kind::ChainedEquations: return "chained";
  }
  return "unknown";
}

ImputerSpec::Kind parse_imputer_kind(std::string_view name) {
  if (name == "arm-mean") return ImputerSpec::Kind::ArmMean;
  if (name == "median") return ImputerSpec::Kind::MedianDeterministic;
  if (name == "stochastic-median") return ImputerSpec::Kind::MedianStochastic;
  if (name == "chained") return ImputerSpec::Kind::ChainedEquations;
  throw std::invalid_argument("unknown imputer '" + std::string(name) + "'");
}

}  // namespace reimpute
