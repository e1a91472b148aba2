#pragma once

#include <CLI11.hpp>

namespace conglab::tools {

void register_commands(CLI::App& app);

} // namespace conglab::tools
