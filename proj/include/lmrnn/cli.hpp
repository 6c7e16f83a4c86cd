#pragma once

#include <iosfwd>

namespace lmrnn {

/// Entry point of the lmrnn tool. Returns the process exit code:
/// 0 success, 2 configuration error, 3 data error, 4 numerical failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lmrnn
