#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spiraldim::cli {

/// Runs one command line. Returns 0 on success, 1 for invalid input (bad
/// flags or a violated precondition) and 2 for numerical failures.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Reads SPIRALDIM_THREADS and applies it to OpenMP (unset: all cores).
void configure_threads();

}  // namespace spiraldim::cli
