#pragma once

// Command dispatch for the `apsf` tool: simulate | krige | loocv | cluster | study.

#include <apsf/kriging.hpp>
#include <apsf/simgen.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace apsf {

struct RunConfig {
  std::string command;
  std::uint64_t seed = 1;
  std::filesystem::path out = "out";

  // Input: either a CSV file or a simulation design.
  std::filesystem::path data;
  std::string design = "bimodal";  ///< bimodal | bspline | agree | disagree
  Eigen::Index grid_size = 101;
  double iota = 1e-6;
  std::vector<std::string> detrend;  ///< covariate names

  // Simulation parameters.
  double bound = 1.0;
  double sigma_a2 = 1.0;
  double noise_sd = 0.5;
  double delta_a = 2.0;
  double delta_b = 0.5;
  std::string layout = "grid5x5";  ///< grid5x5 | random
  int sites = 25;

  // Prediction.
  KrigingConfig kriging{};
  std::vector<std::string> targets;   ///< "x,y"
  std::vector<std::string> holdouts;  ///< site ids predicted from the others

  // Clustering.
  int k = 4;
  std::string linkage = "average";
  bool spatial = true;

  // Studies.
  std::string study = "kriging";  ///< kriging | cluster | scale | confounding
  int replicates = 10;

  void validate() const;
};

/// Runs one command; returns the exit status (0 ok, 1 runtime failure, 2 usage error)
/// and writes a one-line diagnostic to stderr on failure.
int run_command(const RunConfig& config);

/// Parses argv into a RunConfig and runs it.
int run_cli(int argc, const char* const* argv);

}  // namespace apsf
