#pragma once

// Batch experiments behind the robin3 command line tool.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "robin3/robinsolver.hpp"
#include "robin3/trialfield.hpp"

namespace robin3::cli {

enum class Command { DiskSpectrum, DomainSpectrum, FindTrial, VerifyBound, DegreeCheck, Sweep };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NamedDomain {
  std::string name;
  std::vector<std::complex<double>> coeffs;
  double scale = 1.0;
};

struct DegreeOptions {
  int level = 3;
  int refsym_maps = 20;
  double amplitude = 0.2;
  int half_annulus_maps = 5;
  bool certificate = false;  // run the certificate on each (domain, beta)
};

struct ExperimentConfig {
  Command command = Command::DiskSpectrum;
  std::vector<double> beta_grid;  // default: 21 points on [-1, 1]
  bool extended_beta = false;     // append beta = 1.5, 2, ..., 6
  std::vector<NamedDomain> domains;
  SolverConfig solver;  // alpha is set per row
  SearchConfig search;
  DegreeOptions degree;
  std::uint64_t seed = 1;
  std::filesystem::path output_path = "out";
  int jobs = 1;
};

Command parse_command(const std::string& name);
std::string command_name(Command c);

/// Throws ConfigError on invalid input.
ExperimentConfig parse_config(const nlohmann::json& j);

/// Betas actually run, with the extended grid appended when requested.
std::vector<double> effective_betas(const ExperimentConfig& config);

/// Runs the command and writes CSV plus a JSON sidecar into output_path.
/// Returns 0 if every asserted criterion passed, 2 otherwise.
int run(const ExperimentConfig& config, std::ostream& log);

}  // namespace robin3::cli
