#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace omnigraph::cli {

/// Runs one command line (without the program name). Settings come from the
/// defaults, then `--config <file>`, then `--<key> <value>` flags. Returns 0
/// on success, 2 on a usage error (usage text on `err`) and 1 on any other
/// failure, with a diagnostic naming the stage that failed.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace omnigraph::cli
