// Global minimizers of the interaction energy: explicit radial profiles,
// the 2-D ellipsoid solver, the 1-D equilibrium profile, a particle
// gradient-flow oracle, and the Euler-Lagrange (Frostman) certification.
#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "swarmlab/kernels.hpp"
#include "swarmlab/numerics.hpp"

namespace swarmlab {

enum class ProfileVariant {
  radial_indicator,  // c0 on the ball |x| < R
  radial_power,      // c (R^2 - |x|^2)^(1-s) on the ball
  ellipsoid_2d,      // c (1 - (x1/a1)^2 - (x2/a2)^2)^(1-s) on the ellipse
  one_dim,           // C_s (1 - t^2/R_s^2)^(3/2-s) on the segment
  particle_cloud,    // n weighted points
};

const char* profile_variant_name(ProfileVariant v);

struct MinimizerProfile {
  ProfileVariant variant = ProfileVariant::radial_indicator;
  int dim = 2;
  double s = 1.0;
  double mass = 1.0;
  double amplitude = 0.0;             // c or c0 or C_s
  double exponent = 0.0;              // power on the parabolic factor
  double radius = 0.0;                // R (radial kinds, one_dim)
  std::array<double, 2> semi_axes{};  // a1, a2 (ellipsoid only)
  std::vector<Point> points;          // particle_cloud only
  double point_weight = 0.0;

  double density(const Point& x) const;
  // Signed ellipse/ball coordinate: q(x) < 1 inside the support.
  double support_coordinate(const Point& x) const;
  // Distance from x to the support boundary along the ray from the
  // support center (exact for the analytic variants).
  double boundary_distance(const Point& x) const;
  double bounding_radius() const;
  double second_moment_axis(int j) const;  // closed form, analytic variants
  void validate() const;
};

// ---- explicit radial minimizers -----------------------------------------

// Global minimizer for isotropic lambda and no perturbation. For s = N/2
// the profile is the indicator c0 * chi_{B_R}; for s < N/2 it is
// c (R^2-|x|^2)^(1-s). Both (c, R) follow from the interior flatness
// identity plus the mass constraint.
MinimizerProfile explicit_radial_minimizer(const KernelSpec& spec, double mass);

// ---- 2-D ellipsoid solver ------------------------------------------------

// Angular integral behind the ellipse shape equation, normalized so that
// the stationarity condition for the full kernel reads
// grad zeta(a1^2, a2^2) = z with z_j = -(m beta / alpha) / (2 lambda_j^2).
// Requires N = 2 and s in (0,1).
double zeta(const std::array<double, 2>& r, const KernelSpec& spec,
            double mass);
std::array<double, 2> grad_zeta(const std::array<double, 2>& r,
                                const KernelSpec& spec, double mass);
std::array<double, 4> zeta_hessian(const std::array<double, 2>& r,
                                   const KernelSpec& spec, double mass);

// Closed form of the angular log-integral at the endpoint s = 1:
// 2 pi ln((sqrt(r1)+sqrt(r2))/2). The direct quadrature of
// (1/2) * integral of ln(r1 cos^2 + r2 sin^2) reproduces it.
double zeta_closed_form_s1(const std::array<double, 2>& r);

struct EllipsoidSolveStats {
  int iterations = 0;
  double residual = 0.0;        // |grad zeta - z| at the solution
  bool hessian_definite = true; // concavity of the objective held throughout
};

// Semi-axes (a1, a2) of the minimizer for anisotropic lambda in 2-D; solves
// grad zeta(a1^2, a2^2) = z by damped Newton in log coordinates (s < 1) or
// by the endpoint closed form (s = 1). Throws on non-convergence.
MinimizerProfile ellipsoid_shape_from_lambda(const KernelSpec& spec,
                                             double mass,
                                             EllipsoidSolveStats* stats = nullptr);

// ---- 1-D equilibrium profile ----------------------------------------------

struct Profile1dResult {
  MinimizerProfile profile;  // one_dim variant, unit mass
  double R_s = 0.0;
  double C_s = 0.0;
  double V1 = 0.0;           // constant value of the potential on the support
  bool valid = true;         // false when s <= 1/2 (amplitude formula fails)
  std::string warning;
};
Profile1dResult minimizer_1d_profile(double s);

struct Frostman1dReport {
  double V1 = 0.0;
  double max_relative_deviation = 0.0;
  double mass_error = 0.0;
};
// Potential of the 1-D profile under |t|^(2s-2) + t^2, probed on the
// support; deviations are relative to V1.
Frostman1dReport frostman_1d_check(const Profile1dResult& prof,
                                   int n_probe = 33, double quad_tol = 1e-9);

// ---- potentials and Frostman certification -------------------------------

// Potential Phi0 = W * rho0 at a point, by quadrature adapted to the
// singular kernel (polar-centered in 2-D, closed-form angular reduction
// where available). rel_tol controls the radial quadrature.
double potential_at(const MinimizerProfile& prof, const KernelSpec& spec,
                    const Point& x, double rel_tol = 1e-9);
Point potential_gradient_at(const MinimizerProfile& prof,
                            const KernelSpec& spec, const Point& x,
                            double rel_tol = 1e-9);

// Interaction energy of the profile, by quadrature of Phi0 against rho0.
double profile_energy(const MinimizerProfile& prof, const KernelSpec& spec,
                      double rel_tol = 1e-8);

struct ProbeGrid {
  std::vector<Point> interior;
  std::vector<Point> exterior;                  // outside the collar
  std::vector<std::pair<Point, double>> collar; // point and boundary distance
};
ProbeGrid default_probe_grid(const MinimizerProfile& prof, int n_interior,
                             int n_exterior, int n_collar,
                             std::uint64_t seed);

struct FrostmanReport {
  double A0 = 0.0;
  double max_interior_deviation = 0.0;
  double min_exterior_slack = 0.0;
  double boundary_exponent_fit = 0.0;
  bool certified = false;
  double tolerance = 0.0;  // interior tolerance used for the verdict
};
FrostmanReport frostman_check(const MinimizerProfile& prof,
                              const KernelSpec& spec, const ProbeGrid& probe,
                              double interior_tol = 1e-3,
                              double quad_tol = 1e-9);

// ---- particle gradient flow ------------------------------------------------

struct GradientFlowOptions {
  int n = 400;
  int max_steps = 400;
  double initial_step = 0.05;
  double diverge_second_moment = 1e4;
  std::uint64_t seed = 1;
};
struct GradientFlowResult {
  MinimizerProfile cloud;      // particle_cloud variant, recentered
  std::vector<double> energy;  // accepted-step energies, non-increasing
  double support_radius = 0.0; // high-quantile radius estimate
  double aspect_ratio = 0.0;   // sqrt of covariance eigenvalue ratio
};
GradientFlowResult gradient_flow_minimizer(const KernelSpec& spec, double mass,
                                           const GradientFlowOptions& opt);

// ---- tangential-field boundary diagnostic ---------------------------------

enum class BoundaryFieldKind {
  elliptic_rotation,  // tangential: (-a1^2 x2, a2^2 x1) scaled
  boundary_shear,     // tangential, with angular modulation
  normal_control,     // deliberately non-tangential negative control
};

struct ConditionSurPhiReport {
  double ratio_sup = 0.0;       // sup |field . grad Phi0| / (Phi0 - A0)
  double refined_ratio_sup = 0.0;
  bool stable = false;          // refinement changed the sup by < 50%
};
ConditionSurPhiReport conditionsurphi_check(const MinimizerProfile& prof,
                                            const KernelSpec& spec,
                                            BoundaryFieldKind field,
                                            int n_collar = 48,
                                            double quad_tol = 1e-9);

}  // namespace swarmlab
