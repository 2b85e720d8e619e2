#include "gwpt/acceptance.hpp"
#include "gwpt/cli.hpp"

#include <iostream>
#include <sstream>

int main() {
    gwpt::CliRunner cli = [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        return gwpt::cli_run(args, out, err);
    };
    auto results = gwpt::run_acceptance(std::cout, 1, cli);
    return gwpt::all_passed(results) ? 0 : 1;
}
