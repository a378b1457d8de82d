#ifndef SONN_TOOLS_CLI_HPP
#define SONN_TOOLS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace sonn::cli {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kTraining = 3 };

// Runs one command; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sonn::cli

#endif  // SONN_TOOLS_CLI_HPP
