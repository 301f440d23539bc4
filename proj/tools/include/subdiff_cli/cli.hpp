#pragma once

#include <iosfwd>

namespace subdiff::cli {

/// Exit status: 0 success, 1 solver failure or reference mismatch, 2 usage error.
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace subdiff::cli
