#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace topoclass::cli {

enum ExitCode : int {
    kSuccess = 0,
    kQualityFailure = 1,    // e.g. training missed its target, separation failed
    kUsageError = 2,        // bad flags, unreadable or schema-invalid inputs
    kNotApplicable = 3,     // a theorem's hypothesis does not hold for the input
};

// Runs `topoclass <command> [flags]`. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace topoclass::cli
