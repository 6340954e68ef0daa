#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace colorhr {

/// Run the command-line front end on args (without the program name).
/// Returns 0 on success, 2 on usage and input errors, 1 on numerical failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace colorhr
