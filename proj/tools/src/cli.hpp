#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bhdnet::cli {

enum ExitCode : int { ok = 0, usage_error = 1, data_error = 2, runtime_failure = 3 };

// args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bhdnet::cli
