#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ttsa::cli {

// Runs one command line. Returns the process exit status: 0 on success, 2
// for usage or configuration errors, 3 for numerical failures. Errors are
// written to `err` as a single JSON object.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace ttsa::cli
