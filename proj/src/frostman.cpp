// Euler-Lagrange certification of candidate minimizers: the potential must
// be constant on the support, dominate that constant outside, and detach
// from it at the boundary with the predicted exponent.
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "swarmlab/errors.hpp"
#include "swarmlab/minimizers.hpp"
#include "swarmlab/numerics.hpp"

namespace swarmlab {

namespace {

constexpr double kGolden = 2.3999632297286533;  // golden angle

// Boundary point and outward unit normal at parameter theta.
void boundary_frame(const MinimizerProfile& prof, double theta, Point* b,
                    Point* nu) {
  double a1, a2;
  if (prof.variant == ProfileVariant::ellipsoid_2d) {
    a1 = prof.semi_axes[0];
    a2 = prof.semi_axes[1];
  } else {
    a1 = a2 = prof.radius;
  }
  double c = std::cos(theta), s = std::sin(theta);
  *b = Point{a1 * c, a2 * s, 0.0};
  double n1 = c / a1, n2 = s / a2;
  double nn = std::sqrt(n1 * n1 + n2 * n2);
  *nu = Point{n1 / nn, n2 / nn, 0.0};
}

}  // namespace

ProbeGrid default_probe_grid(const MinimizerProfile& prof, int n_interior,
                             int n_exterior, int n_collar,
                             std::uint64_t seed) {
  ProbeGrid grid;
  Rng rng(seed);
  double diam = 2.0 * prof.bounding_radius();

  if (prof.dim == 1) {
    double R = prof.radius;
    for (int i = 0; i < n_interior; ++i) {
      double t = -0.97 * R + 1.94 * R * (i + 0.5) / n_interior;
      grid.interior.push_back(Point{t, 0.0, 0.0});
    }
    for (int i = 0; i < n_exterior; ++i) {
      double t = R * (1.15 + 1.85 * i / std::max(1, n_exterior - 1));
      grid.exterior.push_back(Point{t, 0.0, 0.0});
      grid.exterior.push_back(Point{-t, 0.0, 0.0});
    }
    for (int i = 0; i < n_collar; ++i) {
      double d = diam * std::pow(10.0, -3.0 + 2.0 * i / (n_collar - 1.0));
      grid.collar.emplace_back(Point{R + d, 0.0, 0.0}, d);
    }
    return grid;
  }

  if (prof.dim == 3) {
    // radially symmetric profiles: probe radii along scattered directions
    double R = prof.radius;
    for (int i = 0; i < n_interior; ++i) {
      double r = R * 0.97 * std::sqrt((i + 0.5) / n_interior);
      double z = 2.0 * rng.uniform() - 1.0;
      double phi = 2.0 * kPi * rng.uniform();
      double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      grid.interior.push_back(
          Point{r * rho * std::cos(phi), r * rho * std::sin(phi), r * z});
    }
    for (int i = 0; i < n_exterior; ++i) {
      double r = R * (1.15 + 1.85 * i / std::max(1, n_exterior - 1));
      grid.exterior.push_back(Point{r, 0.0, 0.0});
    }
    for (int i = 0; i < n_collar; ++i) {
      double d = diam * std::pow(10.0, -3.0 + 2.0 * i / (n_collar - 1.0));
      grid.collar.emplace_back(Point{R + d, 0.0, 0.0}, d);
    }
    return grid;
  }

  // 2-D: sunflower spiral inside, rays outside, normal offsets in the collar
  for (int i = 0; i < n_interior; ++i) {
    double f = 0.97 * std::sqrt((i + 0.5) / n_interior);
    double theta = kGolden * i;
    Point b, nu;
    boundary_frame(prof, theta, &b, &nu);
    grid.interior.push_back(Point{f * b[0], f * b[1], 0.0});
  }
  for (int i = 0; i < n_exterior; ++i) {
    double f = 1.15 + 1.85 * (i % 7) / 6.0;
    double theta = kGolden * i + 0.7 * rng.uniform();
    Point b, nu;
    boundary_frame(prof, theta, &b, &nu);
    grid.exterior.push_back(Point{f * b[0], f * b[1], 0.0});
  }
  for (int i = 0; i < n_collar; ++i) {
    double d = diam * std::pow(10.0, -3.0 + 2.0 * i / (n_collar - 1.0));
    double theta = kGolden * i;
    Point b, nu;
    boundary_frame(prof, theta, &b, &nu);
    grid.collar.emplace_back(
        Point{b[0] + d * nu[0], b[1] + d * nu[1], 0.0}, d);
  }
  return grid;
}

FrostmanReport frostman_check(const MinimizerProfile& prof,
                              const KernelSpec& spec, const ProbeGrid& probe,
                              double interior_tol, double quad_tol) {
  if (prof.variant == ProfileVariant::particle_cloud)
    throw std::invalid_argument(
        "frostman_check: analytic profile required (clouds have no density)");
  prof.validate();

  FrostmanReport rep;
  double energy = profile_energy(prof, spec, 10.0 * quad_tol);
  rep.A0 = 2.0 * energy / prof.mass;
  rep.tolerance = interior_tol * std::abs(rep.A0);

  for (const Point& x : probe.interior) {
    double dev = std::abs(potential_at(prof, spec, x, quad_tol) - rep.A0);
    rep.max_interior_deviation = std::max(rep.max_interior_deviation, dev);
  }

  bool first = true;
  for (const Point& x : probe.exterior) {
    double slack = potential_at(prof, spec, x, quad_tol) - rep.A0;
    rep.min_exterior_slack =
        first ? slack : std::min(rep.min_exterior_slack, slack);
    first = false;
  }

  // least-squares slope of ln(Phi - A0) against ln(distance)
  if (probe.collar.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& [x, d] : probe.collar) {
      double gap = potential_at(prof, spec, x, quad_tol) - rep.A0;
      if (!(gap > 0.0)) continue;
      double lx = std::log(d), ly = std::log(gap);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++n;
    }
    if (n >= 2)
      rep.boundary_exponent_fit =
          (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }

  rep.certified = rep.max_interior_deviation < rep.tolerance &&
                  (probe.exterior.empty() || rep.min_exterior_slack > 0.0);
  return rep;
}

ConditionSurPhiReport conditionsurphi_check(const MinimizerProfile& prof,
                                            const KernelSpec& spec,
                                            BoundaryFieldKind field,
                                            int n_collar, double quad_tol) {
  if (prof.dim != 2)
    throw std::invalid_argument("conditionsurphi_check: 2-D profiles only");
  prof.validate();

  double a1, a2;
  if (prof.variant == ProfileVariant::ellipsoid_2d) {
    a1 = prof.semi_axes[0];
    a2 = prof.semi_axes[1];
  } else {
    a1 = a2 = prof.radius;
  }
  double scale = 1.0 / (a1 * a2);

  auto theta_field = [&](const Point& x) {
    Point t{-a1 * a1 * x[1] * scale, a2 * a2 * x[0] * scale, 0.0};
    switch (field) {
      case BoundaryFieldKind::elliptic_rotation:
        return t;
      case BoundaryFieldKind::boundary_shear: {
        double ang = std::atan2(x[1] / a2, x[0] / a1);
        double mod = std::cos(2.0 * ang);
        return Point{mod * t[0], mod * t[1], 0.0};
      }
      case BoundaryFieldKind::normal_control:
        return Point{x[0] / (a1 * a1), x[1] / (a2 * a2), 0.0};
    }
    return t;
  };

  double energy = profile_energy(prof, spec, 10.0 * quad_tol);
  double a0 = 2.0 * energy / prof.mass;
  double diam = 2.0 * prof.bounding_radius();

  auto sup_ratio = [&](double d_lo, double d_hi) {
    double sup = 0.0;
    int n_dist = 5;
    int n_ang = std::max(4, n_collar / n_dist);
    for (int k = 0; k < n_dist; ++k) {
      double d = diam * d_lo *
                 std::pow(d_hi / d_lo, k / (n_dist - 1.0));
      for (int i = 0; i < n_ang; ++i) {
        double theta = 2.0 * kPi * (i + 0.5) / n_ang;
        Point b, nu;
        boundary_frame(prof, theta, &b, &nu);
        Point x{b[0] + d * nu[0], b[1] + d * nu[1], 0.0};
        double gap = potential_at(prof, spec, x, quad_tol) - a0;
        if (!(gap > 0.0)) continue;
        Point g = potential_gradient_at(prof, spec, x, quad_tol);
        Point th = theta_field(x);
        double num = std::abs(th[0] * g[0] + th[1] * g[1]);
        sup = std::max(sup, num / gap);
      }
    }
    return sup;
  };

  ConditionSurPhiReport rep;
  rep.ratio_sup = sup_ratio(1e-3, 1e-1);
  rep.refined_ratio_sup = sup_ratio(5e-4, 5e-2);
  double ref = std::max(rep.ratio_sup, 1e-9);
  rep.stable = std::abs(rep.refined_ratio_sup - rep.ratio_sup) < 0.5 * ref;
  return rep;
}

}  // namespace swarmlab
