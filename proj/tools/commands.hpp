#pragma once

#include <string>

#include "config.hpp"

namespace hmcli {

// Each command writes its artifacts under output.dir and returns the JSON summary.
json run_command(const std::string& name, const json& cfg);

const std::vector<std::string>& command_names();
const std::string& command_description(const std::string& name);

}  // namespace hmcli
