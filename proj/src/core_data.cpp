#include "reimpute/core_data.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace reimpute {

MaskedMatrix::MaskedMatrix(Eigen::MatrixXd values, MaskArray mask)
    : values_(std::move(values)), mask_(std::move(mask)) {
  if (values_.rows() != mask_.rows() || values_.cols() != mask_.cols()) {
    throw std::invalid_argument("MaskedMatrix: values and mask differ in shape");
  }
  if (values_.rows() < 1) {
    throw std::invalid_argument("MaskedMatrix: at least one row is required");
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (Index c = 0; c < values_.cols(); ++c) {
    for (Index r = 0; r < values_.rows(); ++r) {
      if (mask_(r, c)) {
        values_(r, c) = nan;
      } else if (std::isnan(values_(r, c))) {
        throw std::invalid_argument("MaskedMatrix: NaN in an observed cell");
      }
    }
  }
}

MaskedMatrix MaskedMatrix::complete(Eigen::MatrixXd values) {
  MaskArray mask = MaskArray::Constant(values.rows(), values.cols(), false);
  return MaskedMatrix(std::move(values), std::move(mask));
}

MaskedMatrix MaskedMatrix::from_nan(Eigen::MatrixXd values) {
  MaskArray mask = values.array().isNaN();
  return MaskedMatrix(std::move(values), std::move(mask));
}

std::optional<double> MaskedMatrix::cell(Index r, Index c) const {
  if (mask_(r, c)) return std::nullopt;
  return values_(r, c);
}

Index MaskedMatrix::missing_count(Index c) const {
  return mask_.col(c).count();
}

Index MaskedMatrix::missing_count() const { return mask_.count(); }

std::vector<double> MaskedMatrix::observed(Index c) const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(rows()));
  for (Index r = 0; r < rows(); ++r) {
    if (!mask_(r, c)) out.push_back(values_(r, c));
  }
  return out;
}

TreatmentVector::TreatmentVector(std::vector<std::uint8_t> z) : z_(std::move(z)) {
  for (auto v : z_) {
    if (v > 1) throw std::invalid_argument("TreatmentVector: entries must be 0 or 1");
  }
}

TreatmentVector::TreatmentVector(std::initializer_list<int> z) {
  z_.reserve(z.size());
  for (int v : z) {
    if (v != 0 && v != 1) {
      throw std::invalid_argument("TreatmentVector: entries must be 0 or 1");
    }
    z_.push_back(static_cast<std::uint8_t>(v));
  }
}

std::size_t TreatmentVector::count_treated() const {
  std::size_t n = 0;
  for (auto v : z_) n += v;
  return n;
}

GroupStructure::GroupStructure(Kind kind, std::vector<int> membership)
    : kind_(kind), membership_(std::move(membership)) {
  if (kind_ == Kind::None) {
    membership_.clear();
    return;
  }
  int max_id = -1;
  for (int g : membership_) {
    if (g < 0) throw std::invalid_argument("GroupStructure: negative group id");
    max_id = std::max(max_id, g);
  }
  members_.assign(static_cast<std::size_t>(max_id + 1), {});
  for (std::size_t i = 0; i < membership_.size(); ++i) {
    members_[static_cast<std::size_t>(membership_[i])].push_back(static_cast<Index>(i));
  }
  for (const auto& m : members_) {
    if (m.empty()) {
      throw std::invalid_argument("GroupStructure: group ids must be contiguous");
    }
  }
}

GroupStructure GroupStructure::from_labels(Kind kind,
                                           const std::vector<std::string>& labels) {
  std::unordered_map<std::string, int> ids;
  std::vector<int> membership;
  membership.reserve(labels.size());
  for (const auto& label : labels) {
    auto [it, inserted] = ids.emplace(label, static_cast<int>(ids.size()));
    membership.push_back(it->second);
  }
  return GroupStructure(kind, std::move(membership));
}

Dataset::Dataset(TreatmentVector z, MaskedMatrix x, MaskedMatrix y,
                 GroupStructure groups, ColumnNames names)
    : z_(std::move(z)),
      x_(std::move(x)),
      y_(std::move(y)),
      groups_(std::move(groups)),
      names_(std::move(names)) {
  const auto n = static_cast<std::size_t>(y_.rows());
  if (y_.cols() < 1) throw std::invalid_argument("Dataset: need at least one outcome");
  if (z_.size() != n) throw std::invalid_argument("Dataset: treatment length mismatch");
  if (static_cast<std::size_t>(x_.rows()) != n) {
    throw std::invalid_argument("Dataset: covariate row count mismatch");
  }
  if (groups_.kind() != GroupStructure::Kind::None && groups_.size() != n) {
    throw std::invalid_argument("Dataset: group membership length mismatch");
  }
  if (names_.outcomes.empty()) {
    for (Index k = 0; k < y_.cols(); ++k) names_.outcomes.push_back("y" + std::to_string(k + 1));
  }
  if (names_.covariates.empty()) {
    for (Index p = 0; p < x_.cols(); ++p) names_.covariates.push_back("x" + std::to_string(p + 1));
  }
}

Dataset::Dataset(TreatmentVector z, MaskedMatrix y, GroupStructure groups)
    : Dataset(std::move(z), MaskedMatrix::complete(Eigen::MatrixXd(y.rows(), 0)), y,
              std::move(groups)) {}

Dataset Dataset::with_outcomes(MaskedMatrix y) const {
  return Dataset(z_, x_, std::move(y), groups_, names_);
}

Dataset Dataset::with_treatment(TreatmentVector z) const {
  return Dataset(std::move(z), x_, y_, groups_, names_);
}

namespace {

constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

std::uint64_t fnv_bytes(std::uint64_t h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
  return h;
}

}  // namespace

std::uint64_t checksum(const MaskedMatrix& m, std::uint64_t seed) {
  std::uint64_t h = seed;
  const std::int64_t dims[2] = {m.rows(), m.cols()};
  h = fnv_bytes(h, dims, sizeof(dims));
  for (Index c = 0; c < m.cols(); ++c) {
    for (Index r = 0; r < m.rows(); ++r) {
      const unsigned char flag = m.missing(r, c) ? 1 : 0;
      h = fnv_bytes(h, &flag, 1);
      if (!flag) {
        const double v = m.raw_values()(r, c);
        h = fnv_bytes(h, &v, sizeof(v));
      }
    }
  }
  return h;
}

std::uint64_t Dataset::checksum() const {
  return reimpute::checksum(y_, reimpute::checksum(x_));
}

ArmSplit split_by_arm(const Dataset& d, Index k) {
  if (k < 0 || k >= d.outcomes()) {
    throw std::out_of_range("split_by_arm: outcome index out of range");
  }
  ArmSplit out;
  for (Index r = 0; r < d.units(); ++r) {
    if (auto v = d.y().cell(r, k)) {
      (d.z().treated(static_cast<std::size_t>(r)) ? out.treated : out.control).push_back(*v);
    }
  }
  return out;
}

}  // namespace reimpute
