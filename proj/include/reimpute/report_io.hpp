#pragma once

#include "reimpute/confidence.hpp"
#include "reimpute/inference.hpp"
#include "reimpute/simulation.hpp"

#include <iosfwd>
#include <string>

namespace reimpute {

/// Result documents. `config` is the resolved configuration text; it is
/// embedded verbatim in JSON and as '#' comment lines in CSV.
std::string inference_json(const InferenceResult& result, const std::string& config,
                           double delta = 0.05);
std::string confidence_json(const ConfidenceResult& result, const std::string& config);
std::string simulation_json(const SimReport& report, const std::string& config);

/// Columns: run, then t_<k> per component (and weight in exact mode).
void write_draws_csv(std::ostream& out, const InferenceResult& result, const std::string& config);
/// Columns: beta0, p_value, in_region.
void write_grid_csv(std::ostream& out, const ConfidenceResult& result, const std::string& config);
/// Columns: method, beta, metric, successes, replications, rate, se, runtime_seconds.
void write_simulation_csv(std::ostream& out, const SimReport& report, const std::string& config);

}  // namespace reimpute
