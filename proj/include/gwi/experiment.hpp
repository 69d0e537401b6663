#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gwi/config.hpp"
#include "gwi/parallel.hpp"
#include "gwi/report.hpp"
#include "gwi/verify.hpp"

namespace gwi {

enum ExitStatus : int { kExitPass = 0, kExitCheckFailure = 1, kExitUsage = 2 };

struct ExperimentResult {
  VerificationReport report;
  std::vector<std::string> files;  // every file written, in order

  int exit_status() const { return report.all_passed() ? kExitPass : kExitCheckFailure; }
};

/// Seed of one check: a function of (master seed, check id) only, so adding or
/// reordering checks leaves the others untouched.
std::uint64_t check_seed(std::uint64_t master, const std::string& check_id);

/// Runs config.checks in order and writes <out_dir>/report.<format> plus one
/// plot-data CSV per table a check produces.
ExperimentResult run_experiment(const ExperimentConfig& config, Exec exec = Exec::parallel);

/// Writes <out_dir>/paths.csv with `paths` stationary trajectories of length n.
ExperimentResult simulate_paths(const ExperimentConfig& config, Exec exec = Exec::parallel);

/// Iterated aggregation workflow: the `iterated` check plus its raw values.
ExperimentResult run_aggregate(const ExperimentConfig& config, Exec exec = Exec::parallel);

/// C_alpha, K, b_alpha and the b+ table as CSV text.
std::string constants_table(const ExperimentConfig& config);

}  // namespace gwi
