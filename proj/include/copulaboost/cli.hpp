#pragma once

namespace cpb {

// Command-line entry point.  Exit codes: 0 success, 1 usage/configuration
// error, 2 numerical failure.
int cli_main(int argc, const char* const* argv);

}  // namespace cpb
