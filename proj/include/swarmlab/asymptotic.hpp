// The limiting center-of-mass dynamics: the averaged external field g, the
// fourth-order ODE integrator for (X, V), the relative field U, the exact
// rigid-transport strong solution, and weak-form residual reports.
#pragma once

#include <string>
#include <vector>

#include "swarmlab/minimizers.hpp"
#include "swarmlab/numerics.hpp"
#include "swarmlab/simulator.hpp"

namespace swarmlab {

// g(X) = (1/m) integral of rho0(x) u_ext(t, x + X) dx. Affine fields reduce
// exactly (the profile is centered); the rest use tensorized Gauss
// quadrature mapped to the support.
Point g_of_X(const MinimizerProfile& profile, const ExternalFieldSpec& u_ext,
             const Point& X, double t);

struct LimitTrajectory {
  std::vector<double> times;
  std::vector<Point> X;
  std::vector<Point> V;
  std::vector<Point> g;  // g(X(t)) at the stored nodes
  MinimizerProfile profile;
  ExternalFieldSpec u_ext;
  double lambda_drag = 0.0;
  int dim = 2;

  // Cubic Hermite interpolation using the stored derivatives
  // X' = V, V' = lambda (g - V); O(dt^4) like the integrator itself.
  void state_at(double t, Point& X_out, Point& V_out) const;
  Point velocity_derivative(int node) const;
};

// Classical one-step fourth-order integration of X' = V,
// V' = lambda (g(X) - V).
LimitTrajectory integrate_xv(const MinimizerProfile& profile,
                             const ExternalFieldSpec& u_ext, double lambda,
                             const Point& X0, const Point& V0, double t_final,
                             double dt);

// U(t, x) = u_ext(t, x + X(t)) - g(X(t)); weighted mean over rho0 vanishes.
Point U_field(const LimitTrajectory& traj, const Point& x, double t);

struct StrongSolutionSpec {
  const LimitTrajectory* trajectory = nullptr;
  std::array<double, 4> A_sym{};  // symmetric linear part, row-major 2x2
  std::array<double, 2> b{};
  double lambda_drag = 0.0;

  // Rigid transport: the velocity field is uniform in space.
  Point velocity(double t, const Point& x) const;
  Point velocity(double t) const;
  // grad P = lambda * A_sym (x - X(t)).
  Point pressure_gradient(double t, const Point& x) const;
  // Material derivative d_t V + V . grad V = V'(t) for rigid transport.
  Point material_derivative(double t) const;
};

// Exact strong solution of the limiting system for a symmetric linear
// external field: V(t, x) = V(t), P = (lambda/2) A_sym(x-X).(x-X).
// Throws std::invalid_argument when A is not symmetric.
StrongSolutionSpec rigid_transport_solution(const LimitTrajectory& traj,
                                            const std::array<double, 4>& A,
                                            const std::array<double, 2>& b);

// Divergence-free-against-rho0 test fields Theta0 supported in the ellipse,
// plus smooth scalar tests for the continuity residual.
struct WeakTestField {
  std::string id;
  // Theta(x) for vector tests, grad phi(x) for scalar tests.
  bool vector_test = true;
  int mode = 1;  // angular/radial modulation index
};

std::vector<WeakTestField> default_test_fields();

struct WeakResidualRow {
  double time = 0.0;
  std::string test_id;
  double residual = 0.0;
};

struct WeakResidualReport {
  std::vector<WeakResidualRow> rows;
  double max_continuity_residual = 0.0;
  double max_momentum_rate = 0.0;  // sup_t |d/dt <j, Theta>|
};

// Continuity tests: |<j - rho V(t), grad phi>| normalized by field
// magnitudes at each snapshot. Momentum tests: finite-difference
// |d/dt <j, Theta>| across consecutive snapshots for each member of the
// divergence-free family.
WeakResidualReport weak_residuals(const std::vector<CoarseFields>& series,
                                  const LimitTrajectory& traj,
                                  const std::vector<WeakTestField>& tests);

// Quadrature of f against the profile density over its analytic support
// (elliptic-polar rule with exact low-order angular moments); clouds reduce
// to weighted sums. Backs g_of_X, U_field, and pressure-moment checks.
double profile_integral_against(const MinimizerProfile& prof,
                                const std::function<double(const Point&)>& f,
                                double rel_tol = 1e-10);

// Largest sampled difference quotient |g(X)-g(Y)|/|X-Y| over random probe
// pairs; bounded by the Lipschitz constant of u_ext.
double g_lipschitz_estimate(const MinimizerProfile& profile,
                            const ExternalFieldSpec& u_ext, double t,
                            double probe_radius, int n_pairs,
                            std::uint64_t seed);

// Residual of the trapezoidal discrete form of the center-of-mass ODE
// evaluated on a recorded observable series (linear external fields reduce
// the field average exactly). Second order in the recording step.
double discrete_com_residual(const std::vector<ObservableRecord>& records,
                             const ExternalFieldSpec& u_ext, double lambda,
                             int dim);

}  // namespace swarmlab
