#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace narwhal {

/// Runs one command line (without the program name). Exit status: 0 on
/// success, 1 on user errors, 2 on internal errors.
int runCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace narwhal
