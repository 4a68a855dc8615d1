// Experiment driver behind the command-line interface: the five experiment
// families plus the aggregated property suites, each returning a process
// exit code (0 ok, 1 config, 2 certification, 3 instability, 4 suite).
#pragma once

#include <cstdint>
#include <string>

#include "swarmlab/config.hpp"

namespace swarmlab {

struct RunnerOptions {
  std::string out_dir;     // empty: use the config's [output] directory
  std::uint64_t seed = 0;  // 0: keep the config's seed
  bool quiet = false;
};

int cmd_minimize(const ExperimentConfig& cfg, const RunnerOptions& opt);
int cmd_simulate(const ExperimentConfig& cfg, const RunnerOptions& opt);
int cmd_sweep(const ExperimentConfig& cfg, const RunnerOptions& opt);
int cmd_check(const std::string& suite, const RunnerOptions& opt);
int cmd_plot(const std::string& csv_path, const std::string& kind,
             const RunnerOptions& opt);

// Maps library exceptions onto the documented exit codes.
int run_guarded(int (*body)(const ExperimentConfig&, const RunnerOptions&),
                const ExperimentConfig& cfg, const RunnerOptions& opt);

}  // namespace swarmlab
