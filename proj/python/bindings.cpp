#include "reimpute/confidence.hpp"
#include "reimpute/errors.hpp"
#include "reimpute/inference.hpp"
#include "reimpute/simulation.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace reimpute;

namespace {

struct Options {
  std::string design;
  std::string imputer;
  std::string regressor;
  std::optional<std::string> adjuster;
  std::string statistic;
  std::string side;
  std::int64_t runs;
  std::uint64_t seed;
  std::string mode;
  bool per_outcome;
  bool conservative;
  int workers;
};

Eigen::MatrixXd as_matrix(const Eigen::MatrixXd& m, Index rows) {
  if (m.rows() == rows) return m;
  if (m.rows() == 1 && m.cols() == rows) return m.transpose();
  throw std::invalid_argument("array length does not match the treatment vector");
}

Dataset make_dataset(const std::vector<int>& z, const Eigen::MatrixXd& y,
                     const std::optional<Eigen::MatrixXd>& x,
                     const std::optional<std::vector<int>>& groups, const std::string& design) {
  std::vector<std::uint8_t> zv;
  for (int v : z) {
    if (v != 0 && v != 1) throw std::invalid_argument("z must be 0/1");
    zv.push_back(static_cast<std::uint8_t>(v));
  }
  const auto n = static_cast<Index>(zv.size());
  MaskedMatrix ym = MaskedMatrix::from_nan(as_matrix(y, n));
  MaskedMatrix xm = x ? MaskedMatrix::from_nan(as_matrix(*x, n)) : MaskedMatrix::complete(Eigen::MatrixXd(n, 0));
  GroupStructure g;
  if (groups) {
    const auto kind = design == "cluster" || design == "cluster-complete" ? GroupStructure::Kind::Clusters
                                                                          : GroupStructure::Kind::Strata;
    std::vector<std::string> labels;
    for (int v : *groups) labels.push_back(std::to_string(v));
    g = GroupStructure::from_labels(kind, labels);
  }
  return Dataset(TreatmentVector(std::move(zv)), std::move(xm), std::move(ym), std::move(g));
}

InferenceSpec make_spec(const Options& o, const Dataset& data) {
  InferenceSpec spec(Design::from_observed(parse_design_kind(o.design), data));
  spec.imputer.kind = parse_imputer_kind(o.imputer);
  spec.imputer.regressor.kind = parse_regressor_kind(o.regressor);
  if (o.adjuster) {
    RegressorSpec adj;
    adj.kind = parse_regressor_kind(*o.adjuster);
    spec.adjuster = adj;
  }
  const auto stat = parse_statistic_kind(o.statistic);
  if (stat == TestStatistic::Kind::AdjustedWilcoxon) {
    spec.statistic = TestStatistic::adjusted_wilcoxon(data.y().mask());
  } else if (stat == TestStatistic::Kind::MissingnessCount) {
    spec.statistic = TestStatistic::missingness_count(data.y().mask());
  } else if (stat == TestStatistic::Kind::WilcoxonRankSum) {
    spec.statistic = TestStatistic::wilcoxon();
  }
  spec.side = parse_side(o.side);
  spec.runs = o.runs;
  spec.seed = o.seed;
  spec.mode = parse_mode(o.mode);
  spec.per_outcome = o.per_outcome;
  spec.conservative = o.conservative;
  spec.workers = o.workers;
  return spec;
}

py::dict to_dict(const InferenceResult& r) {
  py::dict d;
  d["p_hat"] = r.p_hat;
  d["runs"] = r.runs;
  d["seed"] = r.seed;
  d["mode"] = std::string(to_string(r.mode));
  d["side"] = std::string(to_string(r.side));
  py::list comps;
  for (const auto& c : r.components) {
    py::dict cd;
    cd["t_obs"] = c.t_obs;
    cd["count_ge"] = c.count_ge;
    cd["count_le"] = c.count_le;
    cd["p_greater"] = c.p_greater;
    cd["p_less"] = c.p_less;
    cd["p_hat"] = c.p_hat;
    if (c.exact) cd["exact"] = py::make_tuple(c.exact->numerator, c.exact->denominator);
    comps.append(cd);
  }
  d["components"] = comps;
  d["holm_adjusted"] = r.holm_adjusted;
  d["draws"] = r.draws;
  d["hoeffding_half_width"] = r.hoeffding_half_width(0.05);
  return d;
}

#define REIMPUTE_OPTION_ARGS                                                                  \
  py::arg("x") = py::none(), py::arg("groups") = py::none(), py::arg("design") = "complete", \
  py::arg("imputer") = "median", py::arg("regressor") = "ridge",                             \
  py::arg("adjuster") = py::none(), py::arg("statistic") = "permutational-t"

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Randomization tests with missing outcomes (C++ core)";

  py::register_exception<RefusalError>(m, "RefusalError");
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);

  auto run = [](bool one_shot) {
    return [one_shot](const std::vector<int>& z, const Eigen::MatrixXd& y,
                      const std::optional<Eigen::MatrixXd>& x,
                      const std::optional<std::vector<int>>& groups, const std::string& design,
                      const std::string& imputer, const std::string& regressor,
                      const std::optional<std::string>& adjuster, const std::string& statistic,
                      const std::string& side, std::int64_t runs, std::uint64_t seed,
                      const std::string& mode, bool per_outcome, bool conservative, int workers) {
      const Dataset data = make_dataset(z, y, x, groups, design);
      const InferenceSpec spec = make_spec({design, imputer, regressor, adjuster, statistic, side, runs,
                                            seed, mode, per_outcome, conservative, workers},
                                           data);
      std::optional<InferenceResult> r;
      {
        py::gil_scoped_release release;
        r = one_shot ? run_one_shot_comparator(spec, data) : run_test(spec, data);
      }
      return to_dict(*r);
    };
  };

  m.def("run_test", run(false), py::arg("z"), py::arg("y"), REIMPUTE_OPTION_ARGS,
        py::arg("side") = "greater", py::arg("runs") = 10000, py::arg("seed") = 0,
        py::arg("mode") = "monte-carlo", py::arg("per_outcome") = false,
        py::arg("conservative") = false, py::arg("workers") = 1,
        "Imputation and re-imputation randomization test. Missing outcomes are NaN.");
  m.def("run_one_shot", run(true), py::arg("z"), py::arg("y"), REIMPUTE_OPTION_ARGS,
        py::arg("side") = "greater", py::arg("runs") = 10000, py::arg("seed") = 0,
        py::arg("mode") = "monte-carlo", py::arg("per_outcome") = false,
        py::arg("conservative") = false, py::arg("workers") = 1,
        "One-shot imputation comparator (not a valid test).");

  m.def(
      "confidence_interval",
      [](const std::vector<int>& z, const Eigen::MatrixXd& y, const std::optional<Eigen::MatrixXd>& x,
         const std::optional<std::vector<int>>& groups, const std::string& design,
         const std::string& imputer, const std::string& regressor,
         const std::optional<std::string>& adjuster, const std::string& statistic,
         const std::string& side, std::int64_t runs, std::uint64_t seed, double alpha,
         std::tuple<double, double, double> grid, const std::string& effect, int workers) {
        const Dataset data = make_dataset(z, y, x, groups, design);
        const InferenceSpec spec = make_spec(
            {design, imputer, regressor, adjuster, statistic, side, runs, seed, "monte-carlo", false, false, workers},
            data);
        EffectModel model;
        model.kind = parse_effect_kind(effect);
        ConfidenceResult r;
        {
          py::gil_scoped_release release;
          r = confidence_interval(spec, data, model, alpha,
                                  Grid{std::get<0>(grid), std::get<1>(grid), std::get<2>(grid)});
        }
        py::dict d;
        d["grid"] = r.grid;
        d["pvals"] = r.pvals;
        d["region"] = r.region;
        d["hull"] = r.hull ? py::object(py::make_tuple(r.hull->first, r.hull->second)) : py::none();
        d["contiguous"] = r.contiguous;
        d["warning"] = r.warning;
        return d;
      },
      py::arg("z"), py::arg("y"), REIMPUTE_OPTION_ARGS, py::arg("side") = "two-sided",
      py::arg("runs") = 1000, py::arg("seed") = 0, py::arg("alpha") = 0.05,
      py::arg("grid") = std::tuple<double, double, double>{-1.0, 4.0, 0.05},
      py::arg("effect") = "additive", py::arg("workers") = 1,
      "Confidence region for a scalar effect by test inversion over a grid.");

  m.def(
      "generate",
      [](int model, double beta, Index n, double missing_rate, std::uint64_t seed,
         const std::string& missingness) {
        SimModel sm{model, beta, n, missing_rate, parse_missingness_mode(missingness)};
        Rng rng = child_stream(seed, 0, StreamPurpose::Generator);
        const SimDataset ds = generate(sm, rng);
        std::vector<int> z, groups;
        for (std::size_t i = 0; i < ds.masked.z().size(); ++i) {
          z.push_back(ds.masked.z()[i]);
          groups.push_back(ds.masked.groups().group_of(i));
        }
        py::dict d;
        d["z"] = z;
        d["x"] = ds.masked.x().raw_values();
        Eigen::MatrixXd y = ds.masked.y().raw_values();
        for (Index i = 0; i < y.rows(); ++i)
          for (Index k = 0; k < y.cols(); ++k)
            if (ds.masked.y().missing(i, k)) y(i, k) = std::numeric_limits<double>::quiet_NaN();
        d["y"] = y;
        d["y_true"] = ds.oracle.y().raw_values();
        d["groups"] = groups;
        return d;
      },
      py::arg("model") = 1, py::arg("beta") = 0.0, py::arg("n") = 50, py::arg("missing_rate") = 0.5,
      py::arg("seed") = 0, py::arg("missingness") = "outcome-dependent",
      "Simulated stratified dataset; y holds NaN where the outcome is missing.");

  m.def("required_runs", &required_runs, py::arg("eps"), py::arg("delta"));
  m.def("hoeffding_bound", &hoeffding_bound, py::arg("runs"), py::arg("eps"));
  m.def(
      "holm_bonferroni",
      [](const std::vector<double>& p, double alpha) {
        const HolmResult h = holm_bonferroni(p, alpha);
        return py::make_tuple(h.adjusted, std::vector<bool>(h.rejected.begin(), h.rejected.end()));
      },
      py::arg("pvals"), py::arg("alpha") = 0.05);
}
