#pragma once

#include <iosfwd>

namespace tailrisk::cli {

// Exit codes: 0 success, 1 usage or configuration error, 2 failed verdict.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tailrisk::cli
