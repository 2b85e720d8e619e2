#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gwpt {

// Runs one CLI command. Exit codes: 0 success, 1 verification failure,
// 2 usage or parse error.
int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace gwpt
