// Particle integrator for the stiff kinetic system: Strang splitting of the
// exact drag relaxation around a symplectic kick-drift core, macroscopic
// observables, and kernel-density coarse-graining.
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "swarmlab/grid.hpp"
#include "swarmlab/kernels.hpp"
#include "swarmlab/minimizers.hpp"
#include "swarmlab/numerics.hpp"

namespace swarmlab {

enum class FieldKind { zero, constant, linear, rotation };

struct ExternalFieldSpec {
  FieldKind kind = FieldKind::zero;
  std::array<double, kMaxDim> offset{};                  // b
  std::array<double, kMaxDim * kMaxDim> matrix{};        // A, row-major
  double omega = 0.0;                                    // rotation rate

  Point eval(const Point& x, int dim) const;
  // Largest singular value of the Jacobian (exact for these variants).
  double lipschitz_bound(int dim) const;
  bool symmetric_linear(int dim, double tol = 1e-14) const;
  void validate(int dim) const;
};

struct ParticleEnsemble {
  int dim = 2;
  std::vector<Point> positions;
  std::vector<Point> velocities;
  double weight = 0.0;  // m / n, never mutated by stepping
  double time = 0.0;

  int size() const { return static_cast<int>(positions.size()); }
  double mass() const { return weight * size(); }
};

struct SimConfig {
  double epsilon = 0.1;
  double lambda_drag = 1.0;
  double dt = 0.01;
  double t_final = 1.0;
  KernelSpec kernel;
  ExternalFieldSpec external_field;
  std::uint64_t seed = 1;

  // Stability bound dt <= c_dt * sqrt(epsilon / force_scale): the 1/epsilon
  // interaction makes the fastest oscillation frequency scale as
  // sqrt(force_scale / epsilon).
  double dt_stability_bound() const;
  void validate() const;
};

struct ObservableRecord {
  double time = 0.0;
  double mass = 0.0;
  Point X_eps{};
  Point V_eps{};
  double kinetic_energy = 0.0;
  double interaction_energy = 0.0;  // self-interaction excluded
  double total_energy_H = 0.0;
  double second_moment = 0.0;
};

using VelocityField = std::function<Point(const Point&)>;

// Positions by stratified rejection sampling of profile(. - X_init)/m,
// velocities V_field(x_i) + thermal * xi_i with unit Gaussians xi_i.
ParticleEnsemble well_prepared_initial_data(const MinimizerProfile& profile,
                                            const Point& X_init,
                                            const VelocityField& V_field,
                                            int n, double thermal,
                                            std::uint64_t seed);

// Scratch space reused across steps; carries the force-at-last-position
// cache so one step costs a single O(n^2) force pass.
struct StepWorkspace {
  std::vector<Point> forces;
  bool forces_valid = false;
};

// One Strang step: half drag (exact, frozen positions), velocity-Verlet
// kick-drift-kick under the pairwise force, half drag. Throws
// InstabilityError naming the offending substep on NaN/overflow.
void step(ParticleEnsemble& state, const SimConfig& cfg, StepWorkspace& ws);

// Pairwise forces F_i = -(1/epsilon) * weight * sum_{j != i} grad_W_delta.
void compute_forces(const ParticleEnsemble& state, const SimConfig& cfg,
                    std::vector<Point>& out);

// Self-interaction-excluded energy sum over ordered pairs.
double ensemble_interaction_energy(const ParticleEnsemble& state,
                                   const KernelSpec& kernel);

// energy_reference is the discrete minimum-energy value used to normalize
// total_energy_H; the same convention (ordered-pair sum) on both terms.
ObservableRecord observables(const ParticleEnsemble& state,
                             const SimConfig& cfg, double energy_reference);

struct CoarseFields {
  double time = 0.0;
  double bandwidth = 0.0;
  GridField density;
  std::array<GridField, 2> flux;
  double mass_outside_fraction = 0.0;
};

// Gaussian-kernel density and flux estimates on the grid. Throws
// InstabilityError when more than 0.1% of the mass falls outside the grid.
CoarseFields coarse_grain(const ParticleEnsemble& state, const BoxGrid& grid,
                          double bandwidth);

// Default KDE bandwidth tied to interparticle spacing.
double default_bandwidth(const MinimizerProfile& profile, int n);

// Blob width delta = c_delta * support_radius * n^(-1/dim).
double default_blob_width(double support_radius, int n, int dim,
                          double c_delta = 0.5);

}  // namespace swarmlab
