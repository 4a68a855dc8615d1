// Particle gradient descent on the regularized discrete interaction energy;
// an independent oracle for the analytic minimizer shapes.
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "swarmlab/errors.hpp"
#include "swarmlab/kernels.hpp"
#include "swarmlab/minimizers.hpp"
#include "swarmlab/numerics.hpp"

namespace swarmlab {

namespace {

// E_h = sum over ordered pairs i != j of w^2 W_delta(x_i - x_j)
double discrete_energy(const std::vector<Point>& x, double w,
                       const KernelSpec& spec) {
  KahanSum acc;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      Point d{x[i][0] - x[j][0], x[i][1] - x[j][1], x[i][2] - x[j][2]};
      acc.add(2.0 * eval_W(spec, d.data()));
    }
  return w * w * acc.value();
}

std::vector<Point> energy_gradient(const std::vector<Point>& x, double w,
                                   const KernelSpec& spec) {
  std::vector<Point> g(x.size(), Point{0.0, 0.0, 0.0});
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      Point d{x[i][0] - x[j][0], x[i][1] - x[j][1], x[i][2] - x[j][2]};
      Point gw{};
      grad_W(spec, d.data(), gw.data());
      for (int k = 0; k < spec.dim; ++k) {
        g[i][k] += 2.0 * w * w * gw[k];
        g[j][k] -= 2.0 * w * w * gw[k];
      }
    }
  return g;
}

}  // namespace

GradientFlowResult gradient_flow_minimizer(const KernelSpec& spec, double mass,
                                           const GradientFlowOptions& opt) {
  spec.validate();
  if (opt.n < 100)
    throw std::invalid_argument("gradient_flow_minimizer: needs n >= 100");
  if (!(spec.delta > 0.0))
    throw std::invalid_argument(
        "gradient_flow_minimizer: needs a regularized kernel (delta > 0)");
  if (!(mass > 0.0))
    throw std::invalid_argument("gradient_flow_minimizer: mass must be > 0");

  Rng rng(opt.seed);
  double w = mass / opt.n;

  // seed cloud: uniform in a ball of the rough equilibrium size
  double r0 = 1.0;
  double lam_max = spec.lambda[0];
  for (int j = 1; j < spec.dim; ++j)
    lam_max = std::max(lam_max, spec.lambda[j]);
  r0 = std::max(0.5, lam_max);
  std::vector<Point> x(opt.n, Point{0.0, 0.0, 0.0});
  for (auto& p : x) {
    for (;;) {
      Point c{0.0, 0.0, 0.0};
      double n2 = 0.0;
      for (int k = 0; k < spec.dim; ++k) {
        c[k] = 2.0 * rng.uniform() - 1.0;
        n2 += c[k] * c[k];
      }
      if (n2 <= 1.0) {
        for (int k = 0; k < spec.dim; ++k) p[k] = r0 * c[k];
        break;
      }
    }
  }

  GradientFlowResult out;
  double h = opt.initial_step;
  double energy = discrete_energy(x, w, spec);
  out.energy.push_back(energy);

  std::vector<Point> trial(x.size());
  for (int step = 0; step < opt.max_steps; ++step) {
    std::vector<Point> g = energy_gradient(x, w, spec);
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt, h *= 0.5) {
      for (std::size_t i = 0; i < x.size(); ++i)
        for (int k = 0; k < spec.dim; ++k)
          trial[i][k] = x[i][k] - h * g[i][k];
      double e_trial = discrete_energy(trial, w, spec);
      if (e_trial <= energy) {
        x.swap(trial);
        energy = e_trial;
        out.energy.push_back(energy);
        accepted = true;
        h = std::min(h * 2.0, 10.0 * opt.initial_step);
        break;
      }
    }
    if (!accepted) break;  // stationary to line-search resolution

    double second = 0.0;
    for (const auto& p : x) second += w * norm_sq(p, spec.dim);
    if (second > opt.diverge_second_moment)
      throw InstabilityError(
          "gradient_flow_minimizer: cloud second moment diverged");
  }

  // recenter the cloud's center of mass at the origin exactly
  Point com{0.0, 0.0, 0.0};
  for (const auto& p : x)
    for (int k = 0; k < spec.dim; ++k) com[k] += p[k] / x.size();
  for (auto& p : x)
    for (int k = 0; k < spec.dim; ++k) p[k] -= com[k];

  MinimizerProfile cloud;
  cloud.variant = ProfileVariant::particle_cloud;
  cloud.dim = spec.dim;
  cloud.s = spec.s;
  cloud.mass = mass;
  cloud.points = x;
  cloud.point_weight = w;
  out.cloud = std::move(cloud);

  // support radius: high quantile of |x| is robust to blob-softened edges
  std::vector<double> radii(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    radii[i] = std::sqrt(norm_sq(out.cloud.points[i], spec.dim));
  std::sort(radii.begin(), radii.end());
  out.support_radius = radii[static_cast<std::size_t>(0.98 * (radii.size() - 1))];

  // aspect ratio from the covariance eigenvalues (2-D)
  if (spec.dim == 2) {
    double cxx = 0, cyy = 0, cxy = 0;
    for (const auto& p : out.cloud.points) {
      cxx += p[0] * p[0];
      cyy += p[1] * p[1];
      cxy += p[0] * p[1];
    }
    cxx /= x.size();
    cyy /= x.size();
    cxy /= x.size();
    double tr = cxx + cyy, det = cxx * cyy - cxy * cxy;
    double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
    double e1 = 0.5 * tr + disc, e2 = 0.5 * tr - disc;
    out.aspect_ratio = std::sqrt(e1 / std::max(e2, 1e-300));
  } else {
    out.aspect_ratio = 1.0;
  }
  return out;
}

}  // namespace swarmlab
