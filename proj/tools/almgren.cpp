#include "almgren/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace almgren;

int main(int argc, char **argv) {
  CLI::App app{"Almgren frequency, symmetry strata, beta numbers, Reifenberg checks and covers"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  unsigned threads = 0;
  std::uint64_t seed = 0;
  bool seed_given = false;
  for (const auto &name : command_names()) {
    CLI::App *sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides the config)");
    sub->add_option("--threads", threads, "worker thread cap, 0 = hardware");
    sub->add_option_function<std::uint64_t>(
        "--seed",
        [&](const std::uint64_t &s) {
          seed = s;
          seed_given = true;
        },
        "seed for randomized samples");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  ExperimentConfig config;
  try {
    if (!config_path.empty())
      config = load_config(config_path);
  } catch (const IoError &e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 3;
  } catch (const Error &e) {
    std::cerr << "validation failure: " << e.what() << '\n';
    return 1;
  }
  if (seed_given)
    config.seed = seed;
  if (threads > 0)
    config.threads = threads;
  if (!out_dir.empty())
    config.out = out_dir;
  if (config.threads > 0)
    set_thread_limit(config.threads);

  const std::string command = app.get_subcommands().front()->get_name();
  return run_command(command, config, config.out, std::cout);
}
