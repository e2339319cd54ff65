#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace wlc::cli {

// Entry point of the `wlc` tool. `args` excludes the program name. Returns
// the process exit code; failures print one line "error: <kind>: <message>"
// to `err` (kind is usage, format, io, data, training or internal).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace wlc::cli
