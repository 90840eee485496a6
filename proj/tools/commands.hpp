#pragma once

#include <string>

#include "config.hpp"

namespace pvikit::cli {

// Runs one subcommand against a resolved configuration, writing its
// artifacts and <command>_manifest.json into out_dir.
void run_command(const std::string& command, const RawConfig& raw);

}  // namespace pvikit::cli
