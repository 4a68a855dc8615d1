// Error taxonomy shared across the library; the command layer maps these
// onto process exit codes.
#pragma once

#include <stdexcept>
#include <string>

namespace swarmlab {

// Bad configuration or input schema (exit code 1).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A certification (Frostman, solver convergence) failed (exit code 2).
struct CertificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical blow-up during time integration or optimization (exit code 3).
struct InstabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace swarmlab
