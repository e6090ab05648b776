#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aggtreat {

/// Entry point shared by the binary and the tests. Returns the process exit
/// code: 0 on success, 1 for input/validation problems, 2 for computations
/// that cannot proceed.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace aggtreat
