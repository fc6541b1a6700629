#pragma once

#include <string>
#include <vector>

namespace dqml::cli {

// Exit codes: 0 success, 2 configuration error, 3 numerical failure.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

int run(int argc, const char* const* argv);

// Subcommand entry points (argv without the program/subcommand tokens), used
// directly by tests.
int run_args(const std::vector<std::string>& args);

}  // namespace dqml::cli
