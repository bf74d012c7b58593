#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "memgate/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Memristive analogue gate simulator"};
  app.require_subcommand(1, 1);
  std::string config_path, out_dir;
  bool svg = false;
  for (const auto& name : memgate::command_names()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_dir, "output directory (overrides the config)");
    sub->add_flag("--svg", svg, "also write SVG plots");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    auto cfg = memgate::load_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (svg) cfg.emit_svg = true;
    memgate::run_command(cmd, cfg, std::cout);
  } catch (const memgate::IoError& e) {
    std::cerr << "memgate " << cmd << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "memgate " << cmd << ": " << e.what() << "\n";
    return 1;
  }
  return 0;
}
