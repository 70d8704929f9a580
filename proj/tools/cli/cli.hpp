#ifndef RANKWEIGHT_TOOLS_CLI_HPP
#define RANKWEIGHT_TOOLS_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace rankweight::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

// Runs one `rankweight` invocation.  args[0] is the program name.  Data goes
// to `out` (or --out), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rankweight::cli

#endif  // RANKWEIGHT_TOOLS_CLI_HPP
