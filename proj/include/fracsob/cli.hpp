#pragma once

// Batch front end: sectioned key = value configs, the verify / solve /
// optimize pipelines, and their CSV and JSON artifacts.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fracsob/mild_solver.hpp"
#include "fracsob/optctrl.hpp"

namespace fracsob {

enum class RunMode { verify, solve, optimize };

RunMode parse_mode(const std::string& text);
std::string mode_name(RunMode mode);

struct RunConfig {
  RunMode mode = RunMode::solve;
  ProblemSpec problem;
  double radius = 1.0;
  int quadrature_nodes = 200;
  SolveOptions solve;
  CostSpec cost;
  OptimizeOptions optimize;
  /// "zero" or "random" (a sampled admissible bundle drawn from the seed).
  std::string init = "random";
  int baseline_samples = 0;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  int time_stride = 1;
  /// Effective key = value pairs per section, defaults included.
  std::vector<std::pair<std::string, std::string>> echo;
};

/// Parses the sectioned format; throws ParseError with the offending line.
/// [problem] requires alpha, a, N, M and u0.
RunConfig parse_config(const std::string& text);

/// Default instance used by verify without a config file.
RunConfig default_config();

/// Runs the configured mode, writing artifacts to config.out_dir.
/// Returns the process exit status: 0 on success, 1 on failed checks or solves.
int run(const RunConfig& config);

}  // namespace fracsob
