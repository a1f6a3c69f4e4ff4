#include "reimpute/confidence.hpp"

#include "reimpute/parallel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace reimpute {

Dataset transform_outcomes(const Dataset& data, const EffectModel& model, double beta0) {
  if (model.kind == EffectModel::Kind::Multiplicative && !(beta0 > 0.0)) {
    throw std::invalid_argument("multiplicative effect model needs beta0 > 0");
  }
  if (model.kind == EffectModel::Kind::Custom && !model.custom) {
    throw std::invalid_argument("custom effect model has no function");
  }
  for (Index c : model.modifiers) {
    if (c < 0 || c >= data.covariates()) {
      throw std::invalid_argument("effect modifier column " + std::to_string(c) + " out of range");
    }
  }
  const MaskedMatrix& y = data.y();
  const MaskedMatrix& x = data.x();
  Eigen::MatrixXd values = y.raw_values();
  MaskArray mask = y.mask();
  std::vector<double> xrow(static_cast<std::size_t>(x.cols()));

  for (Index i = 0; i < y.rows(); ++i) {
    bool modifier_missing = false;
    for (Index c : model.modifiers) modifier_missing = modifier_missing || x.missing(i, c);
    if (modifier_missing) {
      mask.row(i).setConstant(true);
      continue;
    }
    if (data.z().treated(static_cast<std::size_t>(i))) continue;
    for (Index c = 0; c < x.cols(); ++c) xrow[static_cast<std::size_t>(c)] = x.raw_values()(i, c);
    for (Index k = 0; k < y.cols(); ++k) {
      if (mask(i, k)) continue;
      double& v = values(i, k);
      switch (model.kind) {
        case EffectModel::Kind::Additive: v += beta0; break;
        case EffectModel::Kind::Multiplicative: v *= beta0; break;
        case EffectModel::Kind::Custom: v = model.custom(v, beta0, xrow); break;
      }
    }
  }
  return data.with_outcomes(MaskedMatrix(std::move(values), std::move(mask)));
}

double test_effect(const InferenceSpec& spec, const Dataset& data, const EffectModel& model,
                   double beta0) {
  InferenceSpec local = spec;
  local.keep_draws = false;
  return run_test(local, transform_outcomes(data, model, beta0)).p_hat;
}

std::vector<double> Grid::points() const {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(step > 0.0) || !(lo < hi)) {
    throw std::invalid_argument("grid needs finite lo < hi and step > 0");
  }
  const double span = (hi - lo) / step;
  if (span > 1e7) throw std::invalid_argument("grid has more than 1e7 points");
  const auto n = static_cast<std::int64_t>(std::floor(span + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    // Snap to the step lattice so 0.1-steps land on round decimals.
    const double v = lo + static_cast<double>(i) * step;
    const double snapped = std::round(v / step) * step;
    out.push_back(std::abs(snapped - v) < 1e-9 * step ? snapped : v);
  }
  return out;
}

ConfidenceResult confidence_interval(const InferenceSpec& spec, const Dataset& data,
                                     const EffectModel& model, double alpha, const Grid& grid) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  ConfidenceResult out;
  out.grid = grid.points();
  out.alpha = alpha;
  out.seed = spec.seed;
  out.side = spec.side;
  out.warning =
      "coverage is guaranteed only when missingness depends on covariates alone "
      "(observed or unobserved), not on outcomes";
  out.pvals.assign(out.grid.size(), 0.0);

  // Grid points run concurrently; each inner test is sequential.
  InferenceSpec inner = spec;
  inner.workers = 1;
  parallel_for(static_cast<std::int64_t>(out.grid.size()), spec.workers, [&](std::int64_t i) {
    InferenceSpec s = inner;
    s.seed = derive_seed(spec.seed, static_cast<std::uint64_t>(i), StreamPurpose::Grid);
    out.pvals[static_cast<std::size_t>(i)] = test_effect(s, data, model, out.grid[static_cast<std::size_t>(i)]);
  });

  std::size_t first = out.grid.size(), last = 0;
  for (std::size_t i = 0; i < out.grid.size(); ++i) {
    if (out.pvals[i] >= alpha) {
      out.region.push_back(out.grid[i]);
      first = std::min(first, i);
      last = i;
    }
  }
  if (!out.region.empty()) {
    out.hull = std::pair{out.grid[first], out.grid[last]};
    out.contiguous = out.region.size() == last - first + 1;
  }
  return out;
}

std::string_view to_string(EffectModel::Kind kind) {
  switch (kind) {
    case EffectModel::Kind::Additive: return "additive";
    case EffectModel::Kind::Multiplicative: return "multiplicative";
    case EffectModel::Kind::Custom: return "custom";
  }
  return "unknown";
}

EffectModel::Kind parse_effect_kind(std::string_view name) {
  if (name == "additive") return EffectModel::Kind::Additive;
  if (name == "multiplicative") return EffectModel::Kind::Multiplicative;
  throw std::invalid_argument("unknown effect model '" + std::string(name) + "'");
}

}  // namespace reimpute
