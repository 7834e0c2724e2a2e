#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tpmtl {

// Full command-line front end, separated from main() so tests can drive it
// in-process. Returns the process exit code: 0 success, 2 validation error,
// 1 runtime error.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace tpmtl
