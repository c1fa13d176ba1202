#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace jtag::cli {

// Runs one CLI invocation. `args` excludes the program name.
// Exit codes: 0 success, 1 usage/config error, 2 data error,
// 3 numeric divergence.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace jtag::cli
