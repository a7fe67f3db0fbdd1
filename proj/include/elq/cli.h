#pragma once
// Command-line front end, exposed as a function so tests can drive it
// in-process. Exit codes: 0 success, 1 usage or validation error,
// 2 parse error, 3 resource limit.

#include <iosfwd>
#include <string>
#include <vector>

namespace elq {

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace elq
