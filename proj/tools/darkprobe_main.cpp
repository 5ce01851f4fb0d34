#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "darkprobe/experiments.hpp"
#include "darkprobe/fixtures.hpp"
#include "darkprobe/linalg.hpp"

int main(int argc, char** argv) {
  CLI::App app{"darkprobe: pulsed probe-based state reconstruction of dark systems"};
  app.require_subcommand(1);
  app.set_version_flag("--version", darkprobe::kVersion);

  std::string config_path;
  std::string output_dir;
  uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;

  auto* run = app.add_subcommand("run", "run an experiment from a JSON config");
  run->add_option("config", config_path, "path to the experiment config")->required();
  run->add_option("--output-dir", output_dir, "override the output directory");
  run->add_option("--seed", seed, "override the RNG seed")->each([&](const std::string&) {
    seed_set = true;
  });
  run->add_option("--threads", threads, "cap worker threads");

  auto* fixtures_cmd = app.add_subcommand("list-fixtures", "print the named parameter sets");

  CLI11_PARSE(app, argc, argv);

  if (fixtures_cmd->parsed()) {
    darkprobe::fixtures::print_catalog(std::cout);
    return 0;
  }

  darkprobe::RunOptions opts;
  if (!output_dir.empty()) opts.output_dir = output_dir;
  if (seed_set) opts.seed = seed;
  opts.threads = threads;

  try {
    const auto manifest = darkprobe::run_experiment_file(config_path, opts);
    std::cout << manifest.dump(2) << "\n";
    return 0;
  } catch (const darkprobe::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
