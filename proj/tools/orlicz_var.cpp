#include <iostream>

#include <CLI11.hpp>

#include "orlicz/runner.hpp"
#include "orlicz/version.hpp"

int main(int argc, char** argv) {
  namespace runner = orlicz::runner;
  CLI::App app{"Fractional Orlicz-Sobolev variational experiments"};
  app.set_version_flag("--version", orlicz::kVersion);
  app.require_subcommand(1);

  runner::Invocation inv;
  std::string config, out = "out";
  std::uint64_t seed = 0;
  for (const std::string& name : runner::commands()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "experiment JSON (object or array)");
    sub->add_option("--out", out, "output directory")->capture_default_str();
    sub->add_option("--jobs", inv.jobs, "concurrent experiments")->capture_default_str();
    sub->add_option("--seed", seed, "seed for randomized draws");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : runner::kConfigError;
  }

  CLI::App* used = app.get_subcommands().front();
  inv.command = used->get_name();
  if (!config.empty()) inv.config = config;
  inv.out = out;
  if (used->count("--seed") > 0) inv.seed = seed;
  return runner::run(inv, std::cerr);
}
