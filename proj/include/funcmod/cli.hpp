#pragma once

#include <string>
#include <vector>

namespace funcmod {

// Full command-line entry point. Exit code 0 means no command-level error;
// per-item failures are recorded in the reports without failing the run.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, char** argv);

} // namespace funcmod
