#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace facet::cli {

// Full command-line driver: parses args (program name excluded), executes
// the selected subcommand, and writes reports to `out` and diagnostics to
// `err`.  Returns 0 on success, 1 for domain errors, 2 for usage or parse
// errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace facet::cli
