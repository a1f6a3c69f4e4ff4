#pragma once

#include <iosfwd>

namespace reimpute::cli {

/// Exit codes: 0 ok, 1 run failure, 2 config error, 3 data error, 4 refusal.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace reimpute::cli
