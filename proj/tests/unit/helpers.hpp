#pragma once

#include "reimpute/core_data.hpp"
#include "reimpute/designs.hpp"

#include <cmath>
#include <vector>

namespace reimpute::testing {

inline constexpr double kNA = NAN;

// N = 4, Z = (1, 0, 1, 0), Y* = (1, 0, NA, NA).
inline Dataset four_unit() {
  Eigen::MatrixXd y(4, 1);
  y << 1, 0, kNA, kNA;
  return Dataset(TreatmentVector{1, 0, 1, 0}, MaskedMatrix::from_nan(y));
}

// Every assignment of the four-unit instance, in a fixed reference order.
inline std::vector<TreatmentVector> four_unit_order() {
  return {{1, 0, 1, 0}, {1, 0, 0, 1}, {0, 1, 1, 0}, {0, 1, 0, 1}, {1, 1, 0, 0}, {0, 0, 1, 1}};
}

// Every 0/1 vector of length n with exactly m ones, by brute force over
// all 2^n bit patterns.
inline std::vector<TreatmentVector> all_complete(int n, int m) {
  std::vector<TreatmentVector> out;
  for (unsigned bits = 0; bits < (1u << n); ++bits) {
    std::vector<std::uint8_t> z(static_cast<std::size_t>(n));
    int ones = 0;
    for (int i = 0; i < n; ++i) {
      z[static_cast<std::size_t>(i)] = (bits >> i) & 1u;
      ones += z[static_cast<std::size_t>(i)];
    }
    if (ones == m) out.emplace_back(std::move(z));
  }
  return out;
}

inline Dataset with_covariates(const TreatmentVector& z, Eigen::MatrixXd x, Eigen::MatrixXd y) {
  return Dataset(z, MaskedMatrix::from_nan(std::move(x)), MaskedMatrix::from_nan(std::move(y)));
}

}  // namespace reimpute::testing
