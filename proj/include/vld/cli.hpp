#pragma once

#include <string>
#include <vector>

namespace vld {

// Entry point behind the vld binary; exposed so tests can drive the
// subcommands in-process. Returns the process exit code.
int cli_main(const std::vector<std::string>& args);

} // namespace vld
