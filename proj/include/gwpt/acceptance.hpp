#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace gwpt {

// Optional hook used by the exit-code criterion; absent, that part is
// checked against the library-level parser only.
using CliRunner = std::function<int(const std::vector<std::string>&)>;

struct AcceptanceResult {
    int id;
    std::string name;
    bool passed;
    std::string detail;
    double seconds;
};

// Runs every acceptance criterion, printing one pass/fail line each.
// jobs > 1 runs independent criteria concurrently; output order is fixed.
std::vector<AcceptanceResult> run_acceptance(std::ostream& out, int jobs = 1,
                                             const CliRunner& cli = nullptr,
                                             bool records = false);

bool all_passed(const std::vector<AcceptanceResult>& results);

} // namespace gwpt
