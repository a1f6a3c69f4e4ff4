#include "reimpute/random.hpp"

namespace reimpute {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index,
                          StreamPurpose purpose) noexcept {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ static_cast<std::uint64_t>(purpose));
  return splitmix64(h ^ splitmix64(index));
}

Rng child_stream(std::uint64_t master, std::uint64_t index,
                 StreamPurpose purpose) {
  std::seed_seq seq{
      static_cast<std::uint32_t>(derive_seed(master, index, purpose)),
      static_cast<std::uint32_t>(derive_seed(master, index, purpose) >> 32)};
  return Rng(seq);
}

}  // namespace reimpute
