#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Robin eigenvalue experiments on conformal images of the disk"};
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  int jobs = 1;
  bool extended = false;
  app.add_option("config", config_path, "experiment config (JSON)")->required();
  app.add_option("--seed", seed, "seed for targets and synthetic maps");
  app.add_option("--out", out, "output directory");
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--extended-beta", extended, "append beta = 1.5 .. 6 (outside the theorem range)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  robin3::cli::ExperimentConfig cfg;
  try {
    std::ifstream in(config_path);
    if (!in) throw robin3::cli::ConfigError("cannot read " + config_path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw robin3::cli::ConfigError(std::string("malformed JSON: ") + e.what());
    }
    cfg = robin3::cli::parse_config(j);
  } catch (const robin3::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  }
  if (seed) cfg.seed = *seed;
  if (out) cfg.output_path = *out;
  cfg.jobs = jobs;
  cfg.extended_beta = cfg.extended_beta || extended;

  try {
    return robin3::cli::run(cfg, std::cerr);
  } catch (const robin3::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
