#pragma once

#include "CLI11.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace ctrap::cli {

/// Options shared by every subcommand.
struct Common {
  std::optional<std::filesystem::path> cache_dir;
};

void add_weights_commands(CLI::App& app, const Common& common);
void add_quad2d_command(CLI::App& app, const Common& common);
void add_ibim3d_command(CLI::App& app, const Common& common);

}  // namespace ctrap::cli
