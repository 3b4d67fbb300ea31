#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace freqsketch::cli {

// Runs one CLI invocation. args[0] is the program name. Returns the process
// exit status; errors are reported on `err` as a one-line JSON object.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace freqsketch::cli
