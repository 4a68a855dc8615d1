// Experiment configuration: a sectioned key-value text file (TOML syntax
// subset: [section], key = value, arrays of scalars, comments with #).
// Unknown sections or keys are hard errors so configs stay authoritative.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "swarmlab/kernels.hpp"
#include "swarmlab/simulator.hpp"

namespace swarmlab {

struct MinimizerSection {
  std::string method = "auto";  // auto | radial | ellipsoid | gradient_flow
  double mass = 1.0;
  int flow_particles = 400;
  int flow_steps = 400;
};

struct SimulationSection {
  double epsilon = 0.1;
  double lambda_drag = 1.0;
  double dt = 0.0;      // 0: derived from the stability bound
  double t_final = 1.0;
  int n_particles = 1000;
  double thermal_coeff = 0.2;  // thermal = coeff * sqrt(epsilon)
  double c_delta = 0.5;
  int record_every = 0;        // 0: ~64 records per run
  bool relax_initial = false;  // start from the discrete minimizer
  std::array<double, kMaxDim> X_init{};
  std::array<double, kMaxDim> V_init{};
  bool snapshots = false;
  std::uint64_t seed = 1;
};

struct SweepSection {
  std::vector<double> epsilons;
  std::vector<std::uint64_t> seeds{1};
};

struct OutputSection {
  std::string directory = "out";
  std::vector<std::string> formats{"csv", "json", "svg"};
};

struct ExperimentConfig {
  KernelSpec kernel;
  MinimizerSection minimizer;
  SimulationSection simulation;
  SweepSection sweep;
  ExternalFieldSpec external_field;
  OutputSection output;
};

// Throws ConfigError with file/line context on syntax errors, unknown keys,
// or values that violate the owning module's invariants.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

}  // namespace swarmlab
