#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace idsbench {

/// Exit classes shared by every subcommand.
namespace exitcode {
inline constexpr int kOk = 0;
inline constexpr int kValidation = 1;
inline constexpr int kRuntime = 2;
inline constexpr int kInfrastructure = 3;
}  // namespace exitcode

/// Parses and runs one command line (args[0] is the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace idsbench
