#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace reimpute {

using Index = Eigen::Index;
using MaskArray = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Numeric matrix with a per-cell missingness flag (true = missing).
///
/// Missing cells are stored as NaN and are only reachable through cell(),
/// which reports them as std::nullopt. Consumers that work on whole columns
/// must consult mask() before touching raw_values().
class MaskedMatrix {
 public:
  MaskedMatrix() = default;
  MaskedMatrix(Eigen::MatrixXd values, MaskArray mask);

  /// Fully observed matrix.
  static MaskedMatrix complete(Eigen::MatrixXd values);
  /// Builds the mask from NaN cells.
  static MaskedMatrix from_nan(Eigen::MatrixXd values);

  Index rows() const noexcept { return values_.rows(); }
  Index cols() const noexcept { return values_.cols(); }

  std::optional<double> cell(Index r, Index c) const;
  bool missing(Index r, Index c) const { return mask_(r, c); }

  const MaskArray& mask() const noexcept { return mask_; }
  const Eigen::MatrixXd& raw_values() const noexcept { return values_; }

  Index missing_count(Index c) const;
  Index missing_count() const;
  bool any_missing() const { return missing_count() > 0; }
  bool column_has_missing(Index c) const { return missing_count(c) > 0; }

  /// Non-missing values of column c, in row order.
  std::vector<double> observed(Index c) const;

 private:
  Eigen::MatrixXd values_;
  MaskArray mask_;
};

/// Binary treatment indicators, one per unit.
class TreatmentVector {
 public:
  TreatmentVector() = default;
  explicit TreatmentVector(std::vector<std::uint8_t> z);
  TreatmentVector(std::initializer_list<int> z);

  std::size_t size() const noexcept { return z_.size(); }
  bool treated(std::size_t i) const { return z_[i] != 0; }
  std::uint8_t operator[](std::size_t i) const { return z_[i]; }
  std::size_t count_treated() const;
  std::span<const std::uint8_t> values() const noexcept { return z_; }

  friend bool operator==(const TreatmentVector&, const TreatmentVector&) = default;
  friend auto operator<=>(const TreatmentVector&, const TreatmentVector&) = default;

 private:
  std::vector<std::uint8_t> z_;
};

/// Strata or clusters. Group ids are contiguous 0..I-1 with no empty group.
class GroupStructure {
 public:
  enum class Kind { None, Strata, Clusters };

  GroupStructure() = default;
  GroupStructure(Kind kind, std::vector<int> membership);

  static GroupStructure none() { return {}; }
  /// Interns arbitrary labels in order of first appearance.
  static GroupStructure from_labels(Kind kind,
                                    const std::vector<std::string>& labels);

  Kind kind() const noexcept { return kind_; }
  std::size_t group_count() const noexcept { return members_.size(); }
  std::size_t size() const noexcept { return membership_.size(); }
  int group_of(std::size_t unit) const { return membership_[unit]; }
  const std::vector<int>& membership() const noexcept { return membership_; }
  const std::vector<Index>& members(std::size_t group) const {
    return members_[group];
  }

 private:
  Kind kind_ = Kind::None;
  std::vector<int> membership_;
  std::vector<std::vector<Index>> members_;
};

struct ColumnNames {
  std::string treatment = "z";
  std::vector<std::string> covariates;
  std::vector<std::string> outcomes;
  std::string group;
};

/// Treatments, covariates X*, outcomes Y* (whose mask is M) and groups.
/// Immutable after construction.
class Dataset {
 public:
  Dataset(TreatmentVector z, MaskedMatrix x, MaskedMatrix y,
          GroupStructure groups = {}, ColumnNames names = {});

  /// Outcome-only dataset without covariates.
  Dataset(TreatmentVector z, MaskedMatrix y, GroupStructure groups = {});

  Index units() const noexcept { return y_.rows(); }
  Index outcomes() const noexcept { return y_.cols(); }
  Index covariates() const noexcept { return x_.cols(); }

  const TreatmentVector& z() const noexcept { return z_; }
  const MaskedMatrix& x() const noexcept { return x_; }
  const MaskedMatrix& y() const noexcept { return y_; }
  const GroupStructure& groups() const noexcept { return groups_; }
  const ColumnNames& names() const noexcept { return names_; }

  Dataset with_outcomes(MaskedMatrix y) const;
  Dataset with_treatment(TreatmentVector z) const;

  /// FNV-1a digest over X*, Y* values of observed cells and both masks.
  std::uint64_t checksum() const;

 private:
  TreatmentVector z_;
  MaskedMatrix x_;
  MaskedMatrix y_;
  GroupStructure groups_;
  ColumnNames names_;
};

struct ArmSplit {
  std::vector<double> treated;
  std::vector<double> control;
};

/// Observed values of outcome k partitioned by treatment arm.
ArmSplit split_by_arm(const Dataset& d, Index k);

/// FNV-1a digest of the observed cells and mask of a matrix.
std::uint64_t checksum(const MaskedMatrix& m,
                       std::uint64_t seed = 1469598103934665603ULL);

}  // namespace reimpute
