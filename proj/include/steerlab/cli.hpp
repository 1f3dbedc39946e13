#pragma once

#include <string>
#include <vector>

namespace steerlab {

/// Exit codes: 0 success, 1 unexpected failure, 2 usage or configuration
/// error, 3 numerical failure.
int cli_main(int argc, char** argv);
int cli_main(const std::vector<std::string>& args);

/// Compiled-in directory of the shipped scenario presets.
std::string default_config_dir();

}  // namespace steerlab
