#pragma once

#include <iosfwd>

namespace tgdist {

/// Entry point of the `tgdist` binary. Returns the process exit code:
/// 0 success, 2 usage, 3 data/parse, 4 numeric failure.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace tgdist
