#pragma once

#include <iosfwd>

namespace hrl {

// Entry point of the `hrl` command. Returns the process exit code; normal
// output goes to out, diagnostics and usage to err.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hrl
