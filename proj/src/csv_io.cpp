#include "reimpute/csv_io.hpp"

#include "reimpute/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace reimpute {
namespace {

std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::size_t column_index(const std::vector<std::string>& header,
                         const std::string& name) {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    throw SchemaError("column '" + name + "' not found in header");
  }
  return static_cast<std::size_t>(it - header.begin());
}

std::optional<double> parse_cell(const std::string& raw, const std::string& na,
                                 std::size_t row, const std::string& column) {
  if (raw.empty() || raw == na) return std::nullopt;
  double v = 0.0;
  const char* first = raw.data();
  const char* last = raw.data() + raw.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || std::isnan(v)) {
    throw ParseError("row " + std::to_string(row) + ", column '" + column +
                     "': cannot parse '" + raw + "' as a number");
  }
  return v;
}

}  // namespace

Dataset read_csv(std::istream& in, const CsvSchema& schema) {
  if (schema.treatment.empty()) throw SchemaError("schema: no treatment column");
  if (schema.outcomes.empty()) throw SchemaError("schema: no outcome columns");

  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty file: header row required");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  std::vector<std::string> header = split_record(line);
  for (auto& h : header) h = trim(h);

  const std::size_t zi = column_index(header, schema.treatment);
  std::vector<std::size_t> xi, yi;
  for (const auto& c : schema.covariates) xi.push_back(column_index(header, c));
  for (const auto& c : schema.outcomes) yi.push_back(column_index(header, c));
  const bool has_group = !schema.group.empty();
  const std::size_t gi = has_group ? column_index(header, schema.group) : 0;

  std::vector<std::uint8_t> z;
  std::vector<std::vector<std::optional<double>>> xs, ys;
  std::vector<std::string> labels;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split_record(line);
    if (fields.size() != header.size()) {
      throw FormatError("row " + std::to_string(row) + ": expected " +
                        std::to_string(header.size()) + " fields, found " +
                        std::to_string(fields.size()));
    }
    for (auto& f : fields) f = trim(f);

    const std::string& zraw = fields[zi];
    if (zraw == "0") {
      z.push_back(0);
    } else if (zraw == "1") {
      z.push_back(1);
    } else {
      throw SchemaError("row " + std::to_string(row) + ", treatment column '" +
                        schema.treatment + "': value '" + zraw +
                        "' is not 0 or 1");
    }
    std::vector<std::optional<double>> xr, yr;
    for (std::size_t p = 0; p < xi.size(); ++p) {
      xr.push_back(parse_cell(fields[xi[p]], schema.na_token, row, schema.covariates[p]));
    }
    for (std::size_t k = 0; k < yi.size(); ++k) {
      yr.push_back(parse_cell(fields[yi[k]], schema.na_token, row, schema.outcomes[k]));
    }
    xs.push_back(std::move(xr));
    ys.push_back(std::move(yr));
    if (has_group) {
      if (fields[gi].empty() || fields[gi] == schema.na_token) {
        throw SchemaError("row " + std::to_string(row) + ": missing group id in '" +
                          schema.group + "'");
      }
      labels.push_back(fields[gi]);
    }
  }
  if (z.empty()) throw FormatError("no data rows");

  const auto n = static_cast<Index>(z.size());
  auto to_matrix = [n](const std::vector<std::vector<std::optional<double>>>& rows,
                       std::size_t cols) {
    Eigen::MatrixXd v(n, static_cast<Index>(cols));
    MaskArray m(n, static_cast<Index>(cols));
    for (Index r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        const auto& cell = rows[static_cast<std::size_t>(r)][c];
        m(r, static_cast<Index>(c)) = !cell.has_value();
        v(r, static_cast<Index>(c)) =
            cell.value_or(std::numeric_limits<double>::quiet_NaN());
      }
    }
    return MaskedMatrix(std::move(v), std::move(m));
  };

  GroupStructure groups;
  if (has_group) groups = GroupStructure::from_labels(schema.group_kind, labels);
  ColumnNames names{schema.treatment, schema.covariates, schema.outcomes, schema.group};
  return Dataset(TreatmentVector(std::move(z)), to_matrix(xs, xi.size()),
                 to_matrix(ys, yi.size()), std::move(groups), std::move(names));
}

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return read_csv(in, schema);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const Dataset& d, const std::string& na_token) {
  const auto& names = d.names();
  const bool has_group = d.groups().kind() != GroupStructure::Kind::None;
  std::vector<std::string> header;
  if (has_group) header.push_back(names.group.empty() ? "group" : names.group);
  header.push_back(names.treatment);
  header.insert(header.end(), names.covariates.begin(), names.covariates.end());
  header.insert(header.end(), names.outcomes.begin(), names.outcomes.end());
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  auto cell = [&](const MaskedMatrix& m, Index r, Index c) {
    auto v = m.cell(r, c);
    return v ? format_double(*v) : na_token;
  };
  for (Index r = 0; r < d.units(); ++r) {
    if (has_group) out << d.groups().group_of(static_cast<std::size_t>(r)) << ',';
    out << int(d.z()[static_cast<std::size_t>(r)]);
    for (Index c = 0; c < d.covariates(); ++c) out << ',' << cell(d.x(), r, c);
    for (Index c = 0; c < d.outcomes(); ++c) out << ',' << cell(d.y(), r, c);
    out << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const Dataset& d,
               const std::string& na_token) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_csv(out, d, na_token);
}

}  // namespace reimpute
