// Potential and energy quadrature for analytic minimizer profiles. The
// singular convolution is computed in polar coordinates centered at the
// evaluation point; the power substitution u = r^p with p matched to the
// kernel exponent removes the radial singularity exactly.
#include <cmath>
#include <functional>
#include <stdexcept>

#include "swarmlab/errors.hpp"
#include "swarmlab/kernels.hpp"
#include "swarmlab/minimizers.hpp"
#include "swarmlab/numerics.hpp"

namespace swarmlab {

namespace {

struct RayHit {
  double r_in = 0.0;
  double r_out = 0.0;
  bool hit = false;
};

// Intersection of the ray x + r e, r >= 0, with the profile support.
RayHit ray_support(const MinimizerProfile& prof, const Point& x,
                   double ce, double se) {
  double A, B, C;
  if (prof.variant == ProfileVariant::ellipsoid_2d) {
    double a1 = prof.semi_axes[0], a2 = prof.semi_axes[1];
    A = (ce / a1) * (ce / a1) + (se / a2) * (se / a2);
    B = 2.0 * (x[0] * ce / (a1 * a1) + x[1] * se / (a2 * a2));
    C = prof.support_coordinate(x) - 1.0;
  } else {
    A = 1.0;
    B = 2.0 * (x[0] * ce + x[1] * se);
    C = norm_sq(x, 2) - prof.radius * prof.radius;
  }
  RayHit h;
  double disc = B * B - 4.0 * A * C;
  if (disc <= 0.0) return h;
  double sq = std::sqrt(disc);
  double r0 = (-B - sq) / (2.0 * A);
  double r1 = (-B + sq) / (2.0 * A);
  if (r1 <= 0.0) return h;
  h.hit = true;
  h.r_in = std::max(0.0, r0);
  h.r_out = r1;
  return h;
}

Point ray_point(const Point& x, double ce, double se, double r) {
  return Point{x[0] + r * ce, x[1] + r * se, 0.0};
}

// Angular window of ray directions that meet the support. From an exterior
// point the admissible directions form one cone whose edges are the tangent
// lines; their angles solve a homogeneous quadratic in (cos phi, sin phi).
// Integrands vanish with a Holder kink at the cone edges, so callers feed
// the window to the tanh-sinh rule instead of bisecting across the kinks.
struct AngularWindow {
  double lo = 0.0;
  double hi = 2.0 * kPi;
  bool full = true;   // evaluation point inside the support
  bool empty = false;
};

AngularWindow support_window(const MinimizerProfile& prof, const Point& x) {
  double a1, a2;
  if (prof.variant == ProfileVariant::ellipsoid_2d) {
    a1 = prof.semi_axes[0];
    a2 = prof.semi_axes[1];
  } else {
    a1 = a2 = prof.radius;
  }
  double z1 = x[0] / a1, z2 = x[1] / a2;
  double zz = z1 * z1 + z2 * z2;
  AngularWindow w;
  if (zz <= 1.0 + 1e-12) return w;
  w.full = false;

  // Tangency condition for direction (cos phi / a1, sin phi / a2):
  // A c^2 + B c s + C s^2 = 0.
  double A = (1.0 - z2 * z2) / (a1 * a1);
  double B = 2.0 * z1 * z2 / (a1 * a2);
  double C = (1.0 - z1 * z1) / (a2 * a2);
  double disc = B * B - 4.0 * A * C;
  if (disc <= 0.0) {
    w.empty = true;
    return w;
  }
  double sq = std::sqrt(disc);
  double psi[2];
  if (std::abs(C) >= std::abs(A)) {
    psi[0] = std::atan2(-B + sq, 2.0 * C);
    psi[1] = std::atan2(-B - sq, 2.0 * C);
  } else {
    psi[0] = std::atan2(2.0 * A, -B + sq);
    psi[1] = std::atan2(2.0 * A, -B - sq);
  }

  // Each tangent line contributes one ray with a forward touching point,
  // the one with z . u < 0. The window is the arc between the two rays
  // that contains the direction toward the support's center.
  double edge[2];
  for (int i = 0; i < 2; ++i) {
    double c = std::cos(psi[i]), s = std::sin(psi[i]);
    double zu = z1 * c / a1 + z2 * s / a2;
    edge[i] = (zu < 0.0) ? psi[i] : psi[i] + kPi;
  }
  double center = std::atan2(-z2 * a2, -z1 * a1);
  auto wrap = [](double t) {
    t = std::fmod(t, 2.0 * kPi);
    return t < 0.0 ? t + 2.0 * kPi : t;
  };
  double width = wrap(edge[1] - edge[0]);
  if (wrap(center - edge[0]) <= width) {
    w.lo = edge[0];
    w.hi = edge[0] + width;
  } else {
    w.lo = edge[1];
    w.hi = edge[1] + (2.0 * kPi - width);
  }
  if (w.hi - w.lo < 1e-14) w.empty = true;
  return w;
}

// Singular part S(x) = (E_s * rho)(x) in 2-D by polar-centered quadrature.
// The radial factor r^(2s-1) and the vanishing of the density at the
// support edge are both endpoint singularities, so the radial integrals go
// through the tanh-sinh rule; the angular integrand is then cheap and the
// outer rule only subdivides near grazing directions.
double singular_potential_2d(const MinimizerProfile& prof,
                             const KernelSpec& spec, const Point& x,
                             double rel_tol) {
  bool log_kernel = spec.log_case();
  double sigma = log_kernel ? 0.0 : sigma_constant(2, spec.s);
  double p = 2.0 * spec.s - 1.0;  // radial kernel power times the Jacobian

  auto wedge = [&](double phi) {
    double ce = std::cos(phi), se = std::sin(phi);
    RayHit h = ray_support(prof, x, ce, se);
    if (!h.hit) return 0.0;
    if (log_kernel) {
      auto f = [&](double r) {
        return std::log(r) * prof.density(ray_point(x, ce, se, r)) * r;
      };
      return -tanh_sinh_integrate(f, h.r_in, h.r_out, rel_tol) /
             (2.0 * kPi);
    }
    auto f = [&](double r) {
      return std::pow(r, p) * prof.density(ray_point(x, ce, se, r));
    };
    return sigma * tanh_sinh_integrate(f, h.r_in, h.r_out, rel_tol);
  };
  AngularWindow win = support_window(prof, x);
  if (win.empty) return 0.0;
  if (win.full) return doubling_integrate(wedge, 0.0, 2.0 * kPi, rel_tol);
  return tanh_sinh_integrate(wedge, win.lo, win.hi, rel_tol);
}

// Gradient of the singular part in 2-D. Exact polar form for s > 1/2;
// below that the radial exponent is no longer integrable after one
// derivative, so callers fall back to differencing the potential.
Point singular_gradient_2d(const MinimizerProfile& prof,
                           const KernelSpec& spec, const Point& x,
                           double rel_tol) {
  bool log_kernel = spec.log_case();
  AngularWindow win = support_window(prof, x);
  Point g{0.0, 0.0, 0.0};
  if (win.empty) return g;
  for (int comp = 0; comp < 2; ++comp) {
    auto wedge = [&](double phi) {
      double ce = std::cos(phi), se = std::sin(phi);
      RayHit h = ray_support(prof, x, ce, se);
      if (!h.hit) return 0.0;
      double dir = (comp == 0) ? ce : se;
      // with y = x + r e the kernel argument is -r e, so each derivative
      // picks up a factor -e relative to the radial power rule
      if (log_kernel) {
        auto f = [&](double r) {
          return prof.density(ray_point(x, ce, se, r));
        };
        return dir * tanh_sinh_integrate(f, h.r_in, h.r_out, rel_tol) /
               (2.0 * kPi);
      }
      double sigma = sigma_constant(2, spec.s);
      auto f = [&](double r) {
        return std::pow(r, 2.0 * spec.s - 2.0) *
               prof.density(ray_point(x, ce, se, r));
      };
      double radial = tanh_sinh_integrate(f, h.r_in, h.r_out, rel_tol);
      return dir * sigma * (2.0 - 2.0 * spec.s) * radial;
    };
    g[comp] = win.full
                  ? doubling_integrate(wedge, 0.0, 2.0 * kPi, rel_tol)
                  : tanh_sinh_integrate(wedge, win.lo, win.hi, rel_tol);
  }
  return g;
}

// Closed forms for the uniform disk (s = 1, N = 2) and ball (s = 1, N = 3).
double disk_log_potential(const MinimizerProfile& prof, double r) {
  double R = prof.radius, c = prof.amplitude;
  if (r >= R) return -0.5 * c * R * R * std::log(r);
  return -0.5 * c * R * R * std::log(R) + 0.25 * c * (R * R - r * r);
}

double ball_newton_potential(const MinimizerProfile& prof, double r) {
  double R = prof.radius, c = prof.amplitude;
  if (r >= R) return c * R * R * R / (3.0 * r);
  return c * (0.5 * R * R - r * r / 6.0);
}

// Radial reduction for N = 3: the angular integral of the Riesz kernel
// between two spheres has a closed form.
double singular_potential_3d_radial(const MinimizerProfile& prof,
                                    const KernelSpec& spec, double r0,
                                    double rel_tol) {
  double s = spec.s;
  double sigma = sigma_constant(3, s);
  double q = 2.0 * s - 1.0;
  auto kernel = [&](double rp) {
    if (r0 < 1e-12 * prof.radius)
      return 4.0 * kPi * std::pow(rp, 2.0 * s - 3.0);
    return 2.0 * kPi *
           (std::pow(r0 + rp, q) - std::pow(std::abs(r0 - rp), q)) /
           (q * r0 * rp);
  };
  auto f = [&](double rp) {
    Point y{rp, 0.0, 0.0};
    return prof.density(y) * rp * rp * kernel(rp);
  };
  double R = prof.radius;
  double split = std::min(std::max(r0, 0.0), R);
  double v = tanh_sinh_integrate(f, 0.0, split, rel_tol) +
             tanh_sinh_integrate(f, split, R, rel_tol);
  return sigma * v;
}

double singular_potential_1d(const MinimizerProfile& prof,
                             const KernelSpec& spec, double t,
                             double rel_tol) {
  double s = spec.s;
  double R = prof.radius;
  auto f = [&](double tp) {
    Point y{tp, 0.0, 0.0};
    double d = std::abs(t - tp);
    double k;
    if (spec.log_case())
      k = -std::log(d) / (2.0 * kPi);
    else
      k = sigma_constant(1, s) * std::pow(d, 2.0 * s - 1.0);
    return k * prof.density(y);
  };
  double split = std::clamp(t, -R, R);
  return tanh_sinh_integrate(f, -R, split, rel_tol) +
         tanh_sinh_integrate(f, split, R, rel_tol);
}

// Smooth Gaussian perturbation term by scaled-polar quadrature over the
// support (2-D analytic profiles only).
double gaussian_term_2d(const MinimizerProfile& prof, const KernelSpec& spec,
                        const Point& x, double rel_tol) {
  const PerturbationSpec& p = spec.perturbation;
  double a1, a2;
  if (prof.variant == ProfileVariant::ellipsoid_2d) {
    a1 = prof.semi_axes[0];
    a2 = prof.semi_axes[1];
  } else {
    a1 = a2 = prof.radius;
  }
  double inv2 = 0.5 / (p.sigma_w * p.sigma_w);
  auto angular = [&](double phi) {
    double cph = std::cos(phi), sph = std::sin(phi);
    auto radial = [&](double u) {
      Point y{a1 * u * cph, a2 * u * sph, 0.0};
      double d2 = (x[0] - y[0]) * (x[0] - y[0]) +
                  (x[1] - y[1]) * (x[1] - y[1]);
      return prof.density(y) * std::exp(-d2 * inv2) * u;
    };
    return tanh_sinh_integrate(radial, 0.0, 1.0, rel_tol);
  };
  return p.c * a1 * a2 *
         doubling_integrate(angular, 0.0, 2.0 * kPi, rel_tol);
}

double singular_part(const MinimizerProfile& prof, const KernelSpec& spec,
                     const Point& x, double rel_tol) {
  if (prof.variant == ProfileVariant::particle_cloud)
    throw std::invalid_argument("potential_at: clouds have no density");
  if (spec.dim == 1 || prof.variant == ProfileVariant::one_dim)
    return singular_potential_1d(prof, spec, x[0], rel_tol);
  if (spec.dim == 3) {
    double r0 = std::sqrt(norm_sq(x, 3));
    if (spec.s == 1.0 && prof.exponent == 0.0)
      return ball_newton_potential(prof, r0);
    return singular_potential_3d_radial(prof, spec, r0, rel_tol);
  }
  // N = 2
  if (spec.log_case() && prof.variant != ProfileVariant::ellipsoid_2d)
    return disk_log_potential(prof, std::sqrt(norm_sq(x, 2)));
  return singular_potential_2d(prof, spec, x, rel_tol);
}

}  // namespace

double potential_at(const MinimizerProfile& prof, const KernelSpec& spec,
                    const Point& x, double rel_tol) {
  double v = spec.alpha * singular_part(prof, spec, x, rel_tol);
  // Quadratic part in closed form through the profile's axis moments.
  for (int j = 0; j < spec.dim; ++j) {
    double m2 = prof.second_moment_axis(j);
    v += spec.beta * (prof.mass * x[j] * x[j] + m2) /
         (2.0 * spec.lambda[j] * spec.lambda[j]);
  }
  if (spec.perturbation.kind == PerturbationKind::gaussian) {
    if (spec.dim != 2)
      throw std::invalid_argument(
          "potential_at: gaussian perturbation quadrature is 2-D only");
    v += gaussian_term_2d(prof, spec, x, rel_tol);
  }
  return v;
}

Point potential_gradient_at(const MinimizerProfile& prof,
                            const KernelSpec& spec, const Point& x,
                            double rel_tol) {
  if (spec.perturbation.kind != PerturbationKind::none)
    throw std::invalid_argument(
        "potential_gradient_at: perturbed kernels not supported");
  Point g{0.0, 0.0, 0.0};
  if (spec.dim == 2 && prof.variant != ProfileVariant::one_dim) {
    if (spec.log_case() && prof.variant != ProfileVariant::ellipsoid_2d) {
      // differentiate the closed form
      double r = std::sqrt(norm_sq(x, 2));
      double R = prof.radius, c = prof.amplitude;
      double radial = (r >= R) ? -0.5 * c * R * R / (r * r) : -0.5 * c;
      g[0] = radial * x[0];
      g[1] = radial * x[1];
    } else if (spec.s > 0.5) {
      g = singular_gradient_2d(prof, spec, x, rel_tol);
    } else {
      // symmetric differences of the potential
      double h = 1e-5 * std::max(1.0, prof.bounding_radius());
      for (int j = 0; j < 2; ++j) {
        Point xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        g[j] = (singular_part(prof, spec, xp, rel_tol) -
                singular_part(prof, spec, xm, rel_tol)) /
               (2.0 * h);
      }
    }
  } else if (spec.dim == 3) {
    double r0 = std::sqrt(norm_sq(x, 3));
    double h = 1e-6 * std::max(prof.radius, r0);
    double up = singular_part(prof, spec, Point{r0 + h, 0, 0}, rel_tol);
    double dn = singular_part(prof, spec, Point{std::max(r0 - h, 0.0), 0, 0},
                              rel_tol);
    double dr = (up - dn) / (2.0 * h);
    if (spec.s == 1.0 && prof.exponent == 0.0) {
      double R = prof.radius, c = prof.amplitude;
      dr = (r0 >= R) ? -c * R * R * R / (3.0 * r0 * r0) : -c * r0 / 3.0;
    }
    if (r0 > 0.0)
      for (int j = 0; j < 3; ++j) g[j] = dr * x[j] / r0;
  } else {
    double h = 1e-6 * std::max(1.0, prof.radius);
    Point xp{x[0] + h, 0, 0}, xm{x[0] - h, 0, 0};
    g[0] = (singular_part(prof, spec, xp, rel_tol) -
            singular_part(prof, spec, xm, rel_tol)) /
           (2.0 * h);
  }
  for (int j = 0; j < spec.dim; ++j) g[j] *= spec.alpha;
  for (int j = 0; j < spec.dim; ++j)
    g[j] += spec.beta * prof.mass * x[j] / (spec.lambda[j] * spec.lambda[j]);
  return g;
}

// E[rho] = (1/2) (rho, W * rho); computed as half the potential average.
double profile_energy(const MinimizerProfile& prof, const KernelSpec& spec,
                      double rel_tol) {
  prof.validate();
  double pot_tol = 0.1 * rel_tol;
  if (prof.variant == ProfileVariant::ellipsoid_2d) {
    double a1 = prof.semi_axes[0], a2 = prof.semi_axes[1];
    // quarter-ellipse tensor quadrature; the potential is even in both
    // coordinates for the canonical centered profile
    auto angular = [&](double phi) {
      double cph = std::cos(phi), sph = std::sin(phi);
      auto radial = [&](double u) {
        Point y{a1 * u * cph, a2 * u * sph, 0.0};
        return prof.density(y) * potential_at(prof, spec, y, pot_tol) * u;
      };
      return tanh_sinh_integrate(radial, 0.0, 1.0, 0.3 * rel_tol, 6);
    };
    return 2.0 * a1 * a2 *
           doubling_integrate(angular, 0.0, 0.5 * kPi, 0.3 * rel_tol, 256);
  }
  if (prof.variant == ProfileVariant::one_dim || spec.dim == 1) {
    auto f = [&](double t) {
      Point y{t, 0.0, 0.0};
      return prof.density(y) * potential_at(prof, spec, y, pot_tol);
    };
    return 0.5 * tanh_sinh_integrate(f, -prof.radius, prof.radius, rel_tol);
  }
  if (prof.variant == ProfileVariant::particle_cloud)
    throw std::invalid_argument("profile_energy: use interaction_energy");
  // radial profiles: 1-D integral against the shell measure
  double shell = unit_sphere_area(spec.dim);
  auto f = [&](double r) {
    Point y{r, 0.0, 0.0};
    return prof.density(y) * potential_at(prof, spec, y, pot_tol) *
           std::pow(r, spec.dim - 1);
  };
  return 0.5 * shell *
         tanh_sinh_integrate(f, 0.0, prof.radius, 0.3 * rel_tol, 6);
}

}  // namespace swarmlab
