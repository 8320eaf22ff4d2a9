#pragma once

#include <iosfwd>

namespace gclust::cli {

/// Exit codes: 0 when every output was written, 2 for invalid input
/// (arguments, missing or malformed files, out-of-range values), 1 otherwise.
/// Errors are reported on `err` as one JSON object per line.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gclust::cli
