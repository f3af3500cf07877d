#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace otgrid::cli {

/// Runs one CLI invocation (argv without the program name). Returns the
/// process exit code: 0 success, 2 input/validation error, 3 numerical or
/// solver error, 4 infeasibility. Errors print a JSON object to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace otgrid::cli
