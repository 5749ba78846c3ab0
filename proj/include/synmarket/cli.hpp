#pragma once

#include <iosfwd>

namespace synmarket {

/// Entry point of the `synmarket` command line tool; returns the exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace synmarket
