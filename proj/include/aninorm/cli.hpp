#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace aninorm::cli {

/// Runs the command line `aninorm <args...>` (program name excluded).
/// Returns 0 on success, 1 on usage errors and 2 on numerical failures, in
/// which case a {"code", "message"} JSON object is written to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace aninorm::cli
