#pragma once

#include <cstdint>
#include <functional>

namespace reimpute {

/// Calls body(i) for i in [0, count) on up to `workers` threads. The first
/// exception thrown by any call is rethrown after all threads have joined.
void parallel_for(std::int64_t count, int workers,
                  const std::function<void(std::int64_t)>& body);

}  // namespace reimpute
