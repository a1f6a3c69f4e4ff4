#include "reimpute/report_io.hpp"

#include "reimpute/csv_io.hpp"

#include <json.hpp>

#include <cstdio>
#include <ostream>
#include <sstream>

namespace reimpute {
namespace {

using nlohmann::json;

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void config_comment(std::ostream& out, const std::string& config) {
  std::istringstream lines(config);
  for (std::string line; std::getline(lines, line);) out << "# " << line << '\n';
}

}  // namespace

std::string inference_json(const InferenceResult& r, const std::string& config, double delta) {
  json doc;
  doc["mode"] = to_string(r.mode);
  doc["side"] = to_string(r.side);
  doc["seed"] = r.seed;
  doc["runs"] = r.runs;
  doc["conservative"] = r.conservative;
  doc["covariate_adjusted"] = r.covariate_adjusted;
  doc["one_shot"] = r.one_shot;
  doc["t_obs"] = number(r.components.front().t_obs);
  doc["p_hat"] = number(r.p_hat);
  doc["hoeffding"] = {{"delta", delta}, {"half_width", number(r.hoeffding_half_width(delta))}};
  json comps = json::array();
  for (const auto& c : r.components) {
    json j = {{"t_obs", number(c.t_obs)},
              {"count_ge", c.count_ge},
              {"count_le", c.count_le},
              {"total", r.runs},
              {"p_greater", number(c.p_greater)},
              {"p_less", number(c.p_less)},
              {"p_hat", number(c.p_hat)}};
    if (c.exact) {
      j["exact"] = std::to_string(c.exact->numerator) + "/" + std::to_string(c.exact->denominator);
    }
    comps.push_back(std::move(j));
  }
  doc["components"] = std::move(comps);
  if (!r.holm_adjusted.empty()) doc["holm_adjusted"] = r.holm_adjusted;
  doc["input_checksum"] = hex(r.input_checksum);
  doc["audit_mismatches"] = r.audit_mismatches;
  doc["config"] = config;
  return doc.dump(2) + "\n";
}

std::string confidence_json(const ConfidenceResult& r, const std::string& config) {
  json doc;
  doc["alpha"] = r.alpha;
  doc["seed"] = r.seed;
  doc["side"] = to_string(r.side);
  json grid = json::array();
  for (std::size_t i = 0; i < r.grid.size(); ++i) {
    grid.push_back({{"beta0", r.grid[i]}, {"p_value", number(r.pvals[i])}});
  }
  doc["grid"] = std::move(grid);
  doc["region"] = r.region;
  doc["hull"] = r.hull ? json::array({r.hull->first, r.hull->second}) : json(nullptr);
  doc["contiguous"] = r.contiguous;
  doc["warning"] = r.warning;
  doc["config"] = config;
  return doc.dump(2) + "\n";
}

std::string simulation_json(const SimReport& report, const std::string& config) {
  const StudyConfig& c = report.config;
  json doc;
  doc["model"] = {{"id", c.model.id},
                  {"n", c.model.n},
                  {"missing_rate", c.model.missing_rate},
                  {"missingness", to_string(c.model.missingness)}};
  doc["replications"] = c.replications;
  doc["runs"] = c.runs;
  doc["alpha"] = c.alpha;
  doc["side"] = to_string(c.side);
  doc["seed"] = c.seed;
  json rows = json::array();
  for (const auto& row : report.rows) {
    rows.push_back({{"method", row.method},
                    {"beta", row.beta},
                    {"metric", row.metric},
                    {"successes", row.successes},
                    {"replications", row.replications},
                    {"rate", row.rate},
                    {"se", row.se},
                    {"runtime_seconds", row.runtime_seconds}});
  }
  doc["rows"] = std::move(rows);
  doc["config"] = config;
  return doc.dump(2) + "\n";
}

void write_draws_csv(std::ostream& out, const InferenceResult& r, const std::string& config) {
  config_comment(out, config);
  const std::size_t s = r.components.size();
  out << "run";
  for (std::size_t k = 0; k < s; ++k) out << ",t_" << k;
  const bool weighted = !r.draw_weights.empty();
  if (weighted) out << ",weight";
  out << '\n';
  if (s == 0 || r.draws.empty()) return;
  const std::size_t n = r.draws.size() / s;
  for (std::size_t i = 0; i < n; ++i) {
    out << i + 1;
    for (std::size_t k = 0; k < s; ++k) out << ',' << format_double(r.draws[i * s + k]);
    if (weighted) out << ',' << format_double(r.draw_weights[i]);
    out << '\n';
  }
}

void write_grid_csv(std::ostream& out, const ConfidenceResult& r, const std::string& config) {
  config_comment(out, config);
  out << "beta0,p_value,in_region\n";
  for (std::size_t i = 0; i < r.grid.size(); ++i) {
    out << format_double(r.grid[i]) << ',' << format_double(r.pvals[i]) << ','
        << (r.pvals[i] >= r.alpha ? 1 : 0) << '\n';
  }
}

void write_simulation_csv(std::ostream& out, const SimReport& report, const std::string& config) {
  config_comment(out, config);
  out << "method,beta,metric,successes,replications,rate,se,runtime_seconds\n";
  for (const auto& row : report.rows) {
    out << row.method << ',' << format_double(row.beta) << ',' << row.metric << ','
        << row.successes << ',' << row.replications << ',' << format_double(row.rate) << ','
        << format_double(row.se) << ',' << format_double(row.runtime_seconds) << '\n';
  }
}

}  // namespace reimpute
