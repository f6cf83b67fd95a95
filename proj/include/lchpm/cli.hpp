#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lchpm {

enum ExitCode : int {
    exit_ok = 0,
    exit_other = 1,
    exit_validation = 2,
    exit_budget = 3,
    exit_parse = 4,
};

/// Runs one command; `args` excludes the program name. Results go to `out`,
/// diagnostics and wall time to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lchpm
