// The 1-D equilibrium profile C_s (1 - t^2/R_s^2)^(3/2-s) under the kernel
// |t|^(-2(1-s)) + t^2, and its Frostman verification.
#include <cmath>
#include <sstream>

#include "swarmlab/minimizers.hpp"
#include "swarmlab/numerics.hpp"

namespace swarmlab {

Profile1dResult minimizer_1d_profile(double s) {
  Profile1dResult out;
  double co = std::cos((1.0 - s) * kPi);
  double base = co / ((1.0 - s) * (3.0 - 2.0 * s) * kPi) *
                beta_function(0.5, 0.5 * (5.0 - 2.0 * s));
  double R = std::pow(base, -1.0 / (4.0 - 2.0 * s));
  double C = std::pow(R, 3.0 - 2.0 * s) * co /
             ((1.0 - s) * (3.0 - 2.0 * s) * kPi);
  out.R_s = R;
  out.C_s = C;
  out.V1 = R * R * (0.5 / (1.0 - s) + 0.5 / (3.0 - s));

  out.profile.variant = ProfileVariant::one_dim;
  out.profile.dim = 1;
  out.profile.s = s;
  out.profile.mass = 1.0;
  out.profile.amplitude = C;
  out.profile.exponent = 1.5 - s;
  out.profile.radius = R;

  if (!(std::isfinite(R) && R > 0.0) || !(std::isfinite(C) && C > 0.0)) {
    out.valid = false;
    std::ostringstream msg;
    msg << "amplitude formula outside its validity range at s = " << s
        << " (needs s in (1/2, 1))";
    out.warning = msg.str();
  }
  return out;
}

Frostman1dReport frostman_1d_check(const Profile1dResult& prof, int n_probe,
                                   double quad_tol) {
  const MinimizerProfile& p = prof.profile;
  double R = p.radius;
  double s = p.s;
  Frostman1dReport rep;
  rep.V1 = prof.V1;

  auto dens = [&](double t) { return p.density(Point{t, 0.0, 0.0}); };

  // mass by direct quadrature
  double mass =
      adaptive_integrate(dens, -R, R, quad_tol, 1e-13);
  rep.mass_error = std::abs(mass - p.mass);

  // second moment in closed form; the quadratic kernel part of the
  // potential is then exact: t^2 + M2 for the centered unit-mass profile
  double m2 = p.second_moment_axis(0);

  // singular part with the substitution u = |t-t'|^(2s-1) on each side
  double q = 2.0 * s - 1.0;
  auto singular = [&](double t) {
    auto side = [&](double len, double sign) {
      if (len <= 0.0) return 0.0;
      auto f = [&](double u) {
        return dens(t + sign * std::pow(u, 1.0 / q));
      };
      return adaptive_integrate(f, 0.0, std::pow(len, q), quad_tol, 1e-13) /
             q;
    };
    return side(R - t, 1.0) + side(t + R, -1.0);
  };

  for (int i = 0; i < n_probe; ++i) {
    double t = -0.97 * R + (1.94 * R * i) / (n_probe - 1);
    double pot = singular(t) + t * t + m2;
    rep.max_relative_deviation = std::max(
        rep.max_relative_deviation, std::abs(pot - prof.V1) / std::abs(prof.V1));
  }
  return rep;
}

}  // namespace swarmlab
