// cli.hpp
#pragma once
#include <ostream>
#include <string>
#include <vector>

namespace cbl {

// Runs the command line `args` (without the program name). Artifacts go to
// `out` unless --out names a file; diagnostics and the one-line error go to
// `err`. Returns 0 on success, 1 on input errors, 2 on internal failures.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cbl
