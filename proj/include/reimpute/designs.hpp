#pragma once

#include "reimpute/core_data.hpp"
#include "reimpute/random.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace reimpute {

inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;

struct WeightedAssignment {
  TreatmentVector z;
  double probability;
};

/// A non-adaptive randomization design, fixed before outcomes are seen.
///
/// Complete, stratified, paired and cluster-complete designs are all
/// "choose m of n selection units" within independent blocks, stored as a
/// list of blocks, each holding selection units (a single row, or every row
/// of a cluster) and a treated count.
class Design {
 public:
  enum class Kind { Complete, Stratified, Paired, Bernoulli, ClusterComplete };

  static Design complete(Index n_units, Index n_treated);
  static Design stratified(const GroupStructure& strata,
                           std::vector<Index> treated_per_stratum);
  static Design paired(const GroupStructure& pairs);
  static Design bernoulli(Index n_units, double p_treat = 0.5);
  static Design cluster_complete(const GroupStructure& clusters,
                                 Index n_treated_clusters);

  /// Design of the given kind whose treated counts are read off the observed
  /// assignment (n_treated, m_i per stratum, or treated clusters).
  static Design from_observed(Kind kind, const Dataset& data,
                              double p_treat = 0.5);

  Kind kind() const noexcept { return kind_; }
  Index units() const noexcept { return n_units_; }
  double p_treat() const noexcept { return p_treat_; }

  TreatmentVector sample(Rng& rng) const;

  /// Full support in lexicographic order of per-block chosen index sets.
  /// Throws RefusalError when the support exceeds cap.
  std::vector<WeightedAssignment> enumerate(
      std::uint64_t cap = kDefaultEnumerationCap) const;

  /// |support|, or nullopt when it does not fit in 64 bits.
  std::optional<std::uint64_t> support_size() const;

  /// True when every supported assignment has the same probability.
  bool is_uniform() const noexcept {
    return kind_ != Kind::Bernoulli || p_treat_ == 0.5;
  }

  double assignment_probability(const TreatmentVector& z) const;

  /// Checks that the observed assignment lies in the support.
  void validate_observed(const TreatmentVector& z) const;

 private:
  struct Block {
    std::vector<std::vector<Index>> units;  // selection units -> rows
    Index treated;
  };

  Design(Kind kind, Index n_units) : kind_(kind), n_units_(n_units) {}
  void check_block(const Block& b) const;

  Kind kind_;
  Index n_units_;
  double p_treat_ = 0.5;
  std::vector<Block> blocks_;
};

std::string_view to_string(Design::Kind kind);
Design::Kind parse_design_kind(std::string_view name);

/// n choose k, nullopt on 64-bit overflow.
std::optional<std::uint64_t> binomial(std::uint64_t n, std::uint64_t k);

}  // namespace reimpute
