#include "commands.hpp"

#include "ctrap/version.hpp"

#include <exception>
#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Corrected trapezoidal rules for point singularities and IBIM layer potentials"};
  app.set_version_flag("--version", ctrap::kLibraryVersion);
  app.require_subcommand(1);
  app.fallthrough();
  ctrap::cli::Common common;
  app.add_option("--cache-dir", common.cache_dir,
                 "Weight table directory (default: $CTRAP_CACHE_DIR, else ./ctrap_cache)");
  ctrap::cli::add_weights_commands(app, common);
  ctrap::cli::add_quad2d_command(app, common);
  ctrap::cli::add_ibim3d_command(app, common);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
