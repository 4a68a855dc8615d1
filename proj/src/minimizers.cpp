#include "swarmlab/minimizers.hpp"

#include <cmath>
#include <stdexcept>

#include "swarmlab/errors.hpp"

namespace swarmlab {

const char* profile_variant_name(ProfileVariant v) {
  switch (v) {
    case ProfileVariant::radial_indicator: return "radial_indicator";
    case ProfileVariant::radial_power: return "radial_power";
    case ProfileVariant::ellipsoid_2d: return "ellipsoid_2d";
    case ProfileVariant::one_dim: return "one_dim";
    case ProfileVariant::particle_cloud: return "particle_cloud";
  }
  return "unknown";
}

double MinimizerProfile::support_coordinate(const Point& x) const {
  switch (variant) {
    case ProfileVariant::radial_indicator:
    case ProfileVariant::radial_power:
      return norm_sq(x, dim) / (radius * radius);
    case ProfileVariant::ellipsoid_2d: {
      double q1 = x[0] / semi_axes[0];
      double q2 = x[1] / semi_axes[1];
      return q1 * q1 + q2 * q2;
    }
    case ProfileVariant::one_dim:
      return x[0] * x[0] / (radius * radius);
    case ProfileVariant::particle_cloud: {
      double b = bounding_radius();
      return norm_sq(x, dim) / (b * b);
    }
  }
  return 0.0;
}

double MinimizerProfile::density(const Point& x) const {
  double q = support_coordinate(x);
  if (q >= 1.0) return 0.0;
  if (exponent == 0.0) return amplitude;
  return amplitude * std::pow(1.0 - q, exponent);
}

double MinimizerProfile::boundary_distance(const Point& x) const {
  double r = std::sqrt(norm_sq(x, dim));
  if (variant == ProfileVariant::ellipsoid_2d) {
    if (r == 0.0) return std::min(semi_axes[0], semi_axes[1]);
    double q = std::sqrt(support_coordinate(x));
    return std::abs(r - r / q);
  }
  return std::abs(r - radius);
}

double MinimizerProfile::bounding_radius() const {
  switch (variant) {
    case ProfileVariant::ellipsoid_2d:
      return std::max(semi_axes[0], semi_axes[1]);
    case ProfileVariant::particle_cloud: {
      double b = 0.0;
      for (const Point& p : points) b = std::max(b, norm_sq(p, dim));
      return std::sqrt(b);
    }
    default:
      return radius;
  }
}

double MinimizerProfile::second_moment_axis(int j) const {
  // Closed Beta-function forms of int x_j^2 rho(x) dx for the analytic
  // variants; clouds fall back to the weighted sum.
  switch (variant) {
    case ProfileVariant::radial_indicator:
    case ProfileVariant::radial_power: {
      // mass-normalized radial moment: R^2 * B((N+2)/2, e+1)/B(N/2, e+1) / N
      double e = exponent;
      double n = static_cast<double>(dim);
      double ratio = beta_function(0.5 * n + 1.0, e + 1.0) /
                     beta_function(0.5 * n, e + 1.0);
      return mass * radius * radius * ratio / n;
    }
    case ProfileVariant::ellipsoid_2d: {
      double a = semi_axes[j];
      return mass * a * a / (2.0 * (3.0 - s));
    }
    case ProfileVariant::one_dim: {
      if (j != 0) return 0.0;
      return mass * radius * radius / (2.0 * (3.0 - s));
    }
    case ProfileVariant::particle_cloud: {
      KahanSum acc;
      for (const Point& p : points) acc.add(p[j] * p[j]);
      return point_weight * acc.value();
    }
  }
  return 0.0;
}

void MinimizerProfile::validate() const {
  if (!(mass > 0.0)) throw ConfigError("profile: mass must be positive");
  switch (variant) {
    case ProfileVariant::radial_indicator:
    case ProfileVariant::radial_power:
    case ProfileVariant::one_dim:
      if (!(radius > 0.0) || !(amplitude > 0.0))
        throw ConfigError("profile: radius and amplitude must be positive");
      break;
    case ProfileVariant::ellipsoid_2d:
      if (!(semi_axes[0] > 0.0) || !(semi_axes[1] > 0.0) ||
          !(amplitude > 0.0))
        throw ConfigError("profile: semi-axes and amplitude must be positive");
      break;
    case ProfileVariant::particle_cloud:
      if (points.empty() || !(point_weight > 0.0))
        throw ConfigError("profile: cloud needs points and positive weight");
      break;
  }
}

namespace {

// Constant value of the fractional Laplacian of order sigma applied to
// (1 - |x|^2)^sigma on the unit ball; the key to the amplitude of the
// explicit radial profiles.
double ball_identity_constant(double sigma, int dim) {
  return std::pow(2.0, 2.0 * sigma) * std::tgamma(1.0 + sigma) *
         std::tgamma(0.5 * dim + sigma) / std::tgamma(0.5 * dim);
}

}  // namespace

MinimizerProfile explicit_radial_minimizer(const KernelSpec& spec,
                                           double mass) {
  spec.validate();
  if (!(mass > 0.0))
    throw std::invalid_argument("explicit_radial_minimizer: mass must be > 0");
  if (spec.perturbation.kind != PerturbationKind::none)
    throw std::invalid_argument(
        "explicit_radial_minimizer: requires an unperturbed kernel");
  for (int j = 1; j < spec.dim; ++j)
    if (spec.lambda[j] != spec.lambda[0])
      throw std::invalid_argument(
          "explicit_radial_minimizer: requires isotropic lambda");
  if (!(spec.alpha > 0.0) || !(spec.beta > 0.0))
    throw std::invalid_argument(
        "explicit_radial_minimizer: needs alpha > 0 and beta > 0");

  double expo = 1.0 - spec.s;
  // Flat interior potential forces the amplitude; mass fixes the radius.
  double c = spec.beta * mass * spec.lambda_inv_sq_sum() /
             (spec.alpha * ball_identity_constant(expo, spec.dim));
  double n = static_cast<double>(spec.dim);
  double shell = unit_sphere_area(spec.dim);
  double mass_coef = c * shell * 0.5 * beta_function(0.5 * n, expo + 1.0);
  double R = std::pow(mass / mass_coef, 1.0 / (n + 2.0 * expo));

  MinimizerProfile prof;
  prof.variant = (spec.s == 1.0) ? ProfileVariant::radial_indicator
                                 : ProfileVariant::radial_power;
  prof.dim = spec.dim;
  prof.s = spec.s;
  prof.mass = mass;
  // amplitude is the central density rho(0) = c R^(2 expo)
  prof.amplitude = c * std::pow(R, 2.0 * expo);
  prof.exponent = expo;
  prof.radius = R;
  return prof;
}

}  // namespace swarmlab
