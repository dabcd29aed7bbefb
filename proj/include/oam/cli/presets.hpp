#pragma once

#include <string>
#include <vector>

#include "oam/cli/config.hpp"

namespace oam::cli {

std::vector<std::string> preset_names();
// Config text of a built-in preset; throws ConfigError for unknown names.
const std::string& preset_text(const std::string& name);
Config preset(const std::string& name);

}  // namespace oam::cli
