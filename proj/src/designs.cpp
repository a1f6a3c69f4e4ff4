#include "reimpute/designs.hpp"

#include "reimpute/errors.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace reimpute {

__extension__ using Wide = unsigned __int128;

std::optional<std::uint64_t> binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  Wide acc = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    acc = acc * (n - k + i) / i;
    if (acc > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
  }
  return static_cast<std::uint64_t>(acc);
}

std::string_view to_string(Design::Kind kind) {
  switch (kind) {
    case Design::Kind::Complete: return "complete";
    case Design::Kind::Stratified: return "stratified";
    case Design::Kind::Paired: return "paired";
    case Design::Kind::Bernoulli: return "bernoulli";
    case Design::Kind::ClusterComplete: return "cluster";
  }
  return "unknown";
}

Design::Kind parse_design_kind(std::string_view name) {
  if (name == "complete") return Design::Kind::Complete;
  if (name == "stratified") return Design::Kind::Stratified;
  if (name == "paired") return Design::Kind::Paired;
  if (name == "bernoulli") return Design::Kind::Bernoulli;
  if (name == "cluster" || name == "cluster-complete") return Design::Kind::ClusterComplete;
  if (name == "biased-coin" || name == "adaptive" || name == "sequential") {
    throw std::invalid_argument("design '" + std::string(name) +
                                "' is adaptive; only designs fixed before outcomes are observed are supported");
  }
  throw std::invalid_argument("unknown design '" + std::string(name) + "'");
}

void Design::check_block(const Block& b) const {
  const auto n = static_cast<Index>(b.units.size());
  if (b.treated < 1 || b.treated > n - 1) {
    throw std::invalid_argument("design: treated count " + std::to_string(b.treated) +
                                " must lie in [1, " + std::to_string(n - 1) + "]");
  }
}

Design Design::complete(Index n_units, Index n_treated) {
  Design d(Kind::Complete, n_units);
  Block b;
  for (Index i = 0; i < n_units; ++i) b.units.push_back({i});
  b.treated = n_treated;
  d.check_block(b);
  d.blocks_.push_back(std::move(b));
  return d;
}

Design Design::stratified(const GroupStructure& strata,
                          std::vector<Index> treated_per_stratum) {
  if (strata.kind() == GroupStructure::Kind::None) {
    throw std::invalid_argument("stratified design requires a group structure");
  }
  if (treated_per_stratum.size() != strata.group_count()) {
    throw std::invalid_argument("stratified design: one treated count per stratum required");
  }
  Design d(Kind::Stratified, static_cast<Index>(strata.size()));
  for (std::size_t g = 0; g < strata.group_count(); ++g) {
    if (strata.members(g).size() < 2) {
      throw std::invalid_argument("stratified design: every stratum needs at least 2 units");
    }
    Block b;
    for (Index r : strata.members(g)) b.units.push_back({r});
    b.treated = treated_per_stratum[g];
    d.check_block(b);
    d.blocks_.push_back(std::move(b));
  }
  return d;
}

Design Design::paired(const GroupStructure& pairs) {
  for (std::size_t g = 0; g < pairs.group_count(); ++g) {
    if (pairs.members(g).size() != 2) {
      throw std::invalid_argument("paired design: every pair must have exactly 2 units");
    }
  }
  Design d = stratified(pairs, std::vector<Index>(pairs.group_count(), 1));
  d.kind_ = Kind::Paired;
  return d;
}

Design Design::bernoulli(Index n_units, double p_treat) {
  if (!(p_treat > 0.0 && p_treat < 1.0)) {
    throw std::invalid_argument("bernoulli design: p_treat must lie in (0, 1)");
  }
  if (n_units < 1) throw std::invalid_argument("bernoulli design: no units");
  Design d(Kind::Bernoulli, n_units);
  d.p_treat_ = p_treat;
  return d;
}

Design Design::cluster_complete(const GroupStructure& clusters,
                                Index n_treated_clusters) {
  if (clusters.kind() == GroupStructure::Kind::None) {
    throw std::invalid_argument("cluster design requires a group structure");
  }
  Design d(Kind::ClusterComplete, static_cast<Index>(clusters.size()));
  Block b;
  for (std::size_t g = 0; g < clusters.group_count(); ++g) {
    b.units.push_back(clusters.members(g));
  }
  b.treated = n_treated_clusters;
  d.check_block(b);
  d.blocks_.push_back(std::move(b));
  return d;
}

Design Design::from_observed(Kind kind, const Dataset& data, double p_treat) {
  const auto& z = data.z();
  const auto& groups = data.groups();
  switch (kind) {
    case Kind::Complete:
      return complete(data.units(), static_cast<Index>(z.count_treated()));
    case Kind::Bernoulli:
      return bernoulli(data.units(), p_treat);
    case Kind::Paired:
      return paired(groups);
    case Kind::Stratified: {
      std::vector<Index> m(groups.group_count(), 0);
      for (std::size_t i = 0; i < z.size(); ++i) {
        if (z.treated(i)) ++m[static_cast<std::size_t>(groups.group_of(i))];
      }
      return stratified(groups, std::move(m));
    }
    case Kind::ClusterComplete: {
      Index treated = 0;
      for (std::size_t g = 0; g < groups.group_count(); ++g) {
        const auto& rows = groups.members(g);
        const bool first = z.treated(static_cast<std::size_t>(rows.front()));
        for (Index r : rows) {
          if (z.treated(static_cast<std::size_t>(r)) != first) {
            throw std::invalid_argument("cluster design: cluster " + std::to_string(g) +
                                        " has mixed treatment");
          }
        }
        treated += first ? 1 : 0;
      }
      return cluster_complete(groups, treated);
    }
  }
  throw std::invalid_argument("unknown design kind");
}

TreatmentVector Design::sample(Rng& rng) const {
  std::vector<std::uint8_t> z(static_cast<std::size_t>(n_units_), 0);
  if (kind_ == Kind::Bernoulli) {
    std::bernoulli_distribution coin(p_treat_);
    for (auto& v : z) v = coin(rng) ? 1 : 0;
    return TreatmentVector(std::move(z));
  }
  std::vector<std::size_t> order;
  for (const auto& b : blocks_) {
    const std::size_t n = b.units.size();
    order.resize(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Partial Fisher-Yates: the first `treated` slots are a uniform subset.
    for (std::size_t i = 0; i < static_cast<std::size_t>(b.treated); ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, n - 1);
      std::swap(order[i], order[pick(rng)]);
      for (Index r : b.units[order[i]]) z[static_cast<std::size_t>(r)] = 1;
    }
  }
  return TreatmentVector(std::move(z));
}

std::optional<std::uint64_t> Design::support_size() const {
  if (kind_ == Kind::Bernoulli) {
    if (n_units_ >= 64) return std::nullopt;
    return std::uint64_t{1} << n_units_;
  }
  Wide total = 1;
  for (const auto& b : blocks_) {
    auto c = binomial(b.units.size(), static_cast<std::uint64_t>(b.treated));
    if (!c) return std::nullopt;
    total *= *c;
    if (total > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
  }
  return static_cast<std::uint64_t>(total);
}

namespace {

// All k-subsets of {0..n-1} in lexicographic order.
std::vector<std::vector<std::size_t>> combinations(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  while (true) {
    out.push_back(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

}  // namespace

std::vector<WeightedAssignment> Design::enumerate(std::uint64_t cap) const {
  const auto size = support_size();
  if (!size || *size > cap) {
    throw RefusalError("randomization support has " +
                       (size ? std::to_string(*size) : std::string("more than 2^64")) +
                       " assignments, above the enumeration cap of " +
                       std::to_string(cap) + "; use Monte Carlo mode");
  }
  std::vector<WeightedAssignment> out;
  out.reserve(static_cast<std::size_t>(*size));
  const auto n = static_cast<std::size_t>(n_units_);

  if (kind_ == Kind::Bernoulli) {
    for (std::uint64_t bits = 0; bits < *size; ++bits) {
      std::vector<std::uint8_t> z(n);
      std::size_t treated = 0;
      for (std::size_t i = 0; i < n; ++i) {
        z[i] = static_cast<std::uint8_t>((bits >> (n - 1 - i)) & 1U);
        treated += z[i];
      }
      const double p = std::pow(p_treat_, static_cast<double>(treated)) *
                       std::pow(1.0 - p_treat_, static_cast<double>(n - treated));
      out.push_back({TreatmentVector(std::move(z)), p});
    }
    return out;
  }

  std::vector<std::vector<std::vector<std::size_t>>> per_block;
  for (const auto& b : blocks_) {
    per_block.push_back(combinations(b.units.size(), static_cast<std::size_t>(b.treated)));
  }
  const double prob = 1.0 / static_cast<double>(*size);
  std::vector<std::size_t> counter(blocks_.size(), 0);
  while (true) {
    std::vector<std::uint8_t> z(n, 0);
    for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
      for (std::size_t u : per_block[bi][counter[bi]]) {
        for (Index r : blocks_[bi].units[u]) z[static_cast<std::size_t>(r)] = 1;
      }
    }
    out.push_back({TreatmentVector(std::move(z)), prob});
    // Odometer with the last block varying fastest.
    std::size_t bi = blocks_.size();
    while (bi > 0) {
      --bi;
      if (++counter[bi] < per_block[bi].size()) break;
      counter[bi] = 0;
      if (bi == 0) return out;
    }
    if (blocks_.empty()) return out;
  }
}

double Design::assignment_probability(const TreatmentVector& z) const {
  if (z.size() != static_cast<std::size_t>(n_units_)) return 0.0;
  if (kind_ == Kind::Bernoulli) {
    const auto treated = static_cast<double>(z.count_treated());
    return std::pow(p_treat_, treated) *
           std::pow(1.0 - p_treat_, static_cast<double>(n_units_) - treated);
  }
  double p = 1.0;
  for (const auto& b : blocks_) {
    Index treated = 0;
    for (const auto& unit : b.units) {
      const bool first = z.treated(static_cast<std::size_t>(unit.front()));
      for (Index r : unit) {
        if (z.treated(static_cast<std::size_t>(r)) != first) return 0.0;
      }
      treated += first ? 1 : 0;
    }
    if (treated != b.treated) return 0.0;
    p /= static_cast<double>(*binomial(b.units.size(), static_cast<std::uint64_t>(b.treated)));
  }
  return p;
}

void Design::validate_observed(const TreatmentVector& z) const {
  if (assignment_probability(z) <= 0.0) {
    throw std::invalid_argument("observed assignment is outside the support of the " +
                                std::string(to_string(kind_)) + " design");
  }
}

}  // namespace reimpute
