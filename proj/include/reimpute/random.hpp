#pragma once

#include <cstdint>
#include <random>

namespace reimpute {

using Rng = std::mt19937_64;

/// Tags that keep the random streams of different consumers disjoint even
/// when they share a master seed and an index.
enum class StreamPurpose : std::uint64_t {
  Design = 1,
  Imputation = 2,
  Adjustment = 3,
  Generator = 4,
  Grid = 5,
  Replication = 6,
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of the child stream (master, index, purpose). Pure function.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index,
                          StreamPurpose purpose) noexcept;

Rng child_stream(std::uint64_t master, std::uint64_t index,
                 StreamPurpose purpose);

}  // namespace reimpute
