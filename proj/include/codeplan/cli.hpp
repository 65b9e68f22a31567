#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace codeplan {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitInvalid = 2, kExitInfra = 3 };

// The whole command surface; args excludes the program name. Used by the
// codeplan executable and by in-process callers.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace codeplan
