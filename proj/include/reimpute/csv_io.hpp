#pragma once

#include "reimpute/core_data.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace reimpute {

/// Which CSV columns play which role.
struct CsvSchema {
  std::string treatment;
  std::vector<std::string> covariates;
  std::vector<std::string> outcomes;
  std::string group;  // empty = no group column
  GroupStructure::Kind group_kind = GroupStructure::Kind::Strata;
  std::string na_token = "NA";  // empty cells are always missing too
};

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema);
Dataset read_csv(std::istream& in, const CsvSchema& schema);

/// Writes columns (group?, treatment, covariates..., outcomes...). Observed
/// numbers use the shortest round-trip representation.
void write_csv(const std::filesystem::path& path, const Dataset& d,
               const std::string& na_token = "NA");
void write_csv(std::ostream& out, const Dataset& d,
               const std::string& na_token = "NA");

/// Shortest decimal text that parses back to exactly v.
std::string format_double(double v);

}  // namespace reimpute
