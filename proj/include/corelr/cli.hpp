#pragma once

namespace corelr {

/// Exit codes: 0 success, 1 usage error, 2 input error, 3 internal invariant violation.
int run_cli(int argc, const char* const* argv);

}  // namespace corelr
