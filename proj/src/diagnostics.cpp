#include "swarmlab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "swarmlab/errors.hpp"

namespace swarmlab {

namespace {

// Integral of the singular kernel over the disk of the same area as one
// grid cell, used as the diagonal term of the double midpoint sum.
double singular_cell_integral(const KernelSpec& spec, double spacing) {
  const double r0 = spacing / std::sqrt(kPi);
  if (spec.log_case()) return r0 * r0 * (0.25 - 0.5 * std::log(r0));
  const double sigma = sigma_constant(spec.dim, spec.s);
  return sigma * 2.0 * kPi * std::pow(r0, 2.0 * spec.s) / (2.0 * spec.s);
}

double grid_pair_energy(const GridField& rho, const KernelSpec& spec) {
  const BoxGrid& g = rho.grid;
  const double h2 = g.cell_area();
  const int nx = g.nx;
  const int ny = g.ny;
  KahanSum acc;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double ri = rho.at(i, j);
      if (ri == 0.0) continue;
      const double xi = g.center_x(i);
      const double yi = g.center_y(j);
      for (int l = j; l < ny; ++l) {
        const int k0 = (l == j) ? i + 1 : 0;
        for (int k = k0; k < nx; ++k) {
          const double rj = rho.at(k, l);
          if (rj == 0.0) continue;
          double d[2] = {g.center_x(k) - xi, g.center_y(l) - yi};
          acc.add(2.0 * ri * rj * eval_W(spec, d));
        }
      }
    }
  }
  double energy = acc.value() * h2 * h2;
  const double diag = singular_cell_integral(spec, g.spacing);
  const double w0 = (spec.perturbation.kind == PerturbationKind::gaussian)
                        ? spec.perturbation.c
                        : 0.0;
  KahanSum self;
  for (double v : rho.values) self.add(v * v);
  energy += self.value() * (h2 * spec.alpha * diag + h2 * h2 * w0);
  return energy;
}

GridField coarsen_by_two(const GridField& f) {
  const BoxGrid& g = f.grid;
  BoxGrid cg;
  cg.origin = g.origin;
  cg.spacing = 2.0 * g.spacing;
  cg.nx = g.nx / 2;
  cg.ny = g.ny / 2;
  GridField out = make_field(cg);
  for (int j = 0; j < cg.ny; ++j)
    for (int i = 0; i < cg.nx; ++i)
      out.at(i, j) = 0.25 * (f.at(2 * i, 2 * j) + f.at(2 * i + 1, 2 * j) +
                             f.at(2 * i, 2 * j + 1) + f.at(2 * i + 1, 2 * j + 1));
  return out;
}

}  // namespace

double interaction_energy(const std::vector<Point>& points,
                          const std::vector<double>& weights,
                          const KernelSpec& spec, int dim) {
  if (points.size() != weights.size())
    throw std::invalid_argument("interaction_energy: size mismatch");
  const int n = static_cast<int>(points.size());
  KahanSum acc;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double d[kMaxDim] = {0.0, 0.0, 0.0};
      for (int k = 0; k < dim; ++k) d[k] = points[i][k] - points[j][k];
      acc.add(2.0 * weights[i] * weights[j] * eval_W(spec, d));
    }
  }
  return acc.value();
}

double interaction_energy(const ParticleEnsemble& state,
                          const KernelSpec& spec) {
  return ensemble_interaction_energy(state, spec);
}

double interaction_energy(const GridField& rho, const KernelSpec& spec,
                          double refine_tol) {
  if (spec.dim != 2)
    throw std::invalid_argument("grid interaction energy needs dim == 2");
  KernelSpec sharp = spec;
  sharp.delta = 0.0;
  const double fine = grid_pair_energy(rho, sharp);
  if (rho.grid.nx % 2 == 0 && rho.grid.ny % 2 == 0 && rho.grid.nx >= 8) {
    const double coarse = grid_pair_energy(coarsen_by_two(rho), sharp);
    const double scale = std::max(std::abs(fine), 1e-12);
    if (std::abs(fine - coarse) > refine_tol * scale)
      throw std::runtime_error(
          "grid interaction energy did not converge under coarsening");
  }
  return fine;
}

HmsNorm hminus_s_norm(const GridField& mu, double s, HmsMethod method,
                      const HmsOptions& opts) {
  HmsNorm out;
  out.method = method;
  const BoxGrid& g = mu.grid;
  if (method == HmsMethod::kernel_double_integral) {
    KernelSpec riesz;
    riesz.dim = 2;
    riesz.s = s;
    riesz.alpha = 1.0;
    riesz.beta = 0.0;
    riesz.delta = 0.0;
    const double h2 = g.cell_area();
    KahanSum acc;
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        const double mi = mu.at(i, j);
        if (mi == 0.0) continue;
        const double xi = g.center_x(i);
        const double yi = g.center_y(j);
        for (int l = j; l < g.ny; ++l) {
          const int k0 = (l == j) ? i + 1 : 0;
          for (int k = k0; k < g.nx; ++k) {
            const double mj = mu.at(k, l);
            if (mj == 0.0) continue;
            double d[2] = {g.center_x(k) - xi, g.center_y(l) - yi};
            acc.add(2.0 * mi * mj * eval_Es(riesz, d));
          }
        }
      }
    }
    double energy = acc.value() * h2 * h2;
    const double diag = singular_cell_integral(riesz, g.spacing);
    KahanSum self;
    for (double v : mu.values) self.add(v * v);
    out.value = energy + self.value() * h2 * diag;
    return out;
  }
  const double box = std::max(g.extent_x(), g.extent_y());
  out.xi_min = opts.xi_min_factor * 2.0 * kPi / box;
  out.xi_max = opts.xi_max_factor * kPi / g.spacing;
  out.n_radial = opts.n_radial;
  out.n_angular = opts.n_angular;
  const std::vector<FrequencyNode> freqs =
      radial_log_frequencies(out.xi_min, out.xi_max, opts.n_radial,
                             opts.n_angular);
  const std::vector<std::complex<double>> hat = fourier_at(mu, freqs);
  const double inv_2pi_sq = 1.0 / (4.0 * kPi * kPi);
  const double tail_start = 0.5 * out.xi_max;
  KahanSum total;
  KahanSum tail;
  for (size_t k = 0; k < freqs.size(); ++k) {
    const double r = std::hypot(freqs[k].xi1, freqs[k].xi2);
    const double term = freqs[k].weight * std::norm(hat[k]) *
                        std::pow(r, -2.0 * s) * inv_2pi_sq;
    total.add(term);
    if (r >= tail_start) tail.add(term);
  }
  out.value = total.value();
  out.tail_fraction =
      (out.value > 0.0) ? std::max(0.0, tail.value() / out.value) : 0.0;
  out.truncation_warning = out.tail_fraction > 1e-4;
  return out;
}

namespace {

// Gaussian mollification matching the KDE kernel, separable and
// mass-preserving (the truncated stencil is renormalized to unit sum).
GridField mollify(const GridField& f, double bandwidth) {
  const BoxGrid& g = f.grid;
  const int reach =
      std::max(1, static_cast<int>(std::ceil(5.0 * bandwidth / g.spacing)));
  std::vector<double> taps(2 * reach + 1);
  double norm = 0.0;
  for (int k = -reach; k <= reach; ++k) {
    const double u = k * g.spacing / bandwidth;
    taps[k + reach] = std::exp(-0.5 * u * u);
    norm += taps[k + reach];
  }
  for (double& t : taps) t /= norm;
  GridField tmp = make_field(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      double acc = 0.0;
      for (int k = -reach; k <= reach; ++k) {
        const int ii = std::clamp(i + k, 0, g.nx - 1);
        acc += taps[k + reach] * f.at(ii, j);
      }
      tmp.at(i, j) = acc;
    }
  GridField out = make_field(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      double acc = 0.0;
      for (int k = -reach; k <= reach; ++k) {
        const int jj = std::clamp(j + k, 0, g.ny - 1);
        acc += taps[k + reach] * tmp.at(i, jj);
      }
      out.at(i, j) = acc;
    }
  return out;
}

}  // namespace

ModulatedEnergyReport modulated_energy(const ParticleEnsemble& state,
                                       const LimitTrajectory& traj,
                                       const StrongSolutionSpec& strong,
                                       const KernelSpec& spec,
                                       double energy_reference, double epsilon,
                                       const ModulatedEnergyOptions& opts) {
  if (epsilon <= 0.0)
    throw std::invalid_argument("modulated_energy: epsilon must be positive");
  ModulatedEnergyReport rep;
  rep.time = state.time;
  rep.epsilon = epsilon;
  const int dim = state.dim;
  const int n = state.size();
  const double w = state.weight;
  const double m = state.mass();

  Point X{}, V{};
  traj.state_at(state.time, X, V);

  KahanSum kin;
  Point X_eps{}, V_eps{};
  for (int i = 0; i < n; ++i) {
    const Point rel = strong.velocity(state.time, state.positions[i]);
    double dv2 = 0.0;
    for (int k = 0; k < dim; ++k) {
      const double dv = state.velocities[i][k] - rel[k];
      dv2 += dv * dv;
      X_eps[k] += state.positions[i][k];
      V_eps[k] += state.velocities[i][k];
    }
    kin.add(dv2);
  }
  for (int k = 0; k < dim; ++k) {
    X_eps[k] /= n;
    V_eps[k] /= n;
  }
  rep.kinetic_modulated = 0.5 * w * kin.value();
  rep.energy_gap =
      (interaction_energy(state, spec) - energy_reference) / (2.0 * epsilon);

  double pos_sq = 0.0;
  double vel_sq = 0.0;
  for (int k = 0; k < dim; ++k) {
    const double dx = X_eps[k] - X[k];
    const double dv = V_eps[k] - V[k];
    pos_sq += dx * dx / (spec.lambda[k] * spec.lambda[k]);
    vel_sq += dv * dv;
  }
  rep.com_position_term = m * pos_sq / epsilon;
  rep.com_position_alt = spec.beta * m * m * pos_sq / epsilon;
  rep.com_velocity_term = vel_sq / (2.0 * epsilon);
  rep.total = rep.kinetic_modulated + rep.energy_gap + rep.com_position_term +
              rep.com_velocity_term;

  const bool hms_possible = opts.with_hms && dim == 2 &&
                            traj.profile.variant != ProfileVariant::one_dim &&
                            traj.profile.variant != ProfileVariant::particle_cloud;
  if (hms_possible) {
    const MinimizerProfile& prof = traj.profile;
    double b = opts.bandwidth > 0.0 ? opts.bandwidth
                                    : default_bandwidth(prof, n);
    rep.bandwidth = b;
    double max_dev = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < 2; ++k)
        max_dev = std::max(max_dev, std::abs(state.positions[i][k] - X[k]));
    }
    double half = opts.grid_half_extent > 0.0
                      ? opts.grid_half_extent
                      : std::max(prof.bounding_radius(), max_dev) + 6.0 * b;
    const BoxGrid grid =
        make_centered_grid({X[0], X[1]}, half, opts.grid_cells);
    const CoarseFields coarse = coarse_grain(state, grid, b);
    GridField ref_smooth = make_field(grid);
    if (opts.reference_cloud != nullptr) {
      ParticleEnsemble shifted = *opts.reference_cloud;
      Point com{};
      for (const Point& p : shifted.positions)
        for (int k = 0; k < 2; ++k) com[k] += p[k];
      for (int k = 0; k < 2; ++k) com[k] /= shifted.size();
      for (Point& p : shifted.positions)
        for (int k = 0; k < 2; ++k) p[k] += X[k] - com[k];
      ref_smooth = coarse_grain(shifted, grid, b).density;
    } else {
      GridField ref = sample_field(grid, [&](double x, double y) {
        return prof.density(Point{x - X[0], y - X[1], 0.0});
      });
      ref_smooth = mollify(ref, b);
    }
    const double ref_mass = ref_smooth.integral();
    const double kde_mass = coarse.density.integral();
    if (ref_mass > 0.0) {
      const double scale = kde_mass / ref_mass;
      for (double& v : ref_smooth.values) v *= scale;
    }
    GridField mu = coarse.density;
    for (size_t c = 0; c < mu.values.size(); ++c)
      mu.values[c] -= ref_smooth.values[c];
    rep.hms_sq = hminus_s_norm(mu, spec.s, HmsMethod::fourier_quadrature).value;

    const double A0 =
        2.0 * profile_energy(prof, spec, std::min(opts.quad_tol, 1e-8)) /
        prof.mass;
    KahanSum frost;
    for (int i = 0; i < n; ++i) {
      const Point p{state.positions[i][0] - X[0],
                    state.positions[i][1] - X[1], 0.0};
      frost.add(potential_at(prof, spec, p, opts.quad_tol) - A0);
    }
    rep.frostman_term = w * frost.value();

    // Energy gap of the coarse-grained density through the exact split
    // E[rho_hat] - E_m = E[mu0] + 2 int (Phi0 - A0) rho_hat with
    // mu0 = rho_hat - rho0(.-X) of equal mass; the quadratic kernel part of
    // E[mu0] is minus the dipole term, which the CoM term of the modulated
    // energy repays twice over. The lower bound drops the sign-definite
    // slack kappa alpha |xi|^(-2s) + w_hat, so both sides are comparable
    // with no renormalization of the particle self-energy.
    GridField prof_sample = sample_field(grid, [&](double x, double y) {
      return prof.density(Point{x - X[0], y - X[1], 0.0});
    });
    const double prof_mass = prof_sample.integral();
    if (prof_mass > 0.0) {
      const double match = kde_mass / prof_mass;
      for (double& v : prof_sample.values) v *= match;
    }
    GridField mu0 = coarse.density;
    for (size_t c = 0; c < mu0.values.size(); ++c)
      mu0.values[c] -= prof_sample.values[c];
    rep.hms_sq_profile =
        hminus_s_norm(mu0, spec.s, HmsMethod::fourier_quadrature).value;
    double pert_sq = 0.0;
    if (spec.perturbation.kind != PerturbationKind::none) {
      const HmsOptions hopts;
      const double box = std::max(grid.extent_x(), grid.extent_y());
      const std::vector<FrequencyNode> freqs = radial_log_frequencies(
          hopts.xi_min_factor * 2.0 * kPi / box,
          hopts.xi_max_factor * kPi / grid.spacing, hopts.n_radial,
          hopts.n_angular);
      const std::vector<std::complex<double>> hat = fourier_at(mu0, freqs);
      KahanSum acc;
      for (size_t k = 0; k < freqs.size(); ++k) {
        const double r = std::hypot(freqs[k].xi1, freqs[k].xi2);
        acc.add(freqs[k].weight * w_hat(spec, r) * std::norm(hat[k]));
      }
      pert_sq = acc.value() / (4.0 * kPi * kPi);
    }
    const std::array<double, 2> fm_rho = coarse.density.first_moment();
    const std::array<double, 2> fm_ref = prof_sample.first_moment();
    double dipole_sq = 0.0;
    for (int k = 0; k < 2; ++k) {
      const double d = fm_rho[k] - fm_ref[k];
      dipole_sq += d * d / (spec.lambda[k] * spec.lambda[k]);
    }
    const GridField phi0 =
        profile_potential_field(prof, X, spec, grid, opts.quad_tol);
    KahanSum fg;
    for (size_t c = 0; c < phi0.values.size(); ++c)
      fg.add(coarse.density.values[c] * (phi0.values[c] - A0));
    rep.frostman_cg = fg.value() * grid.cell_area();
    rep.energy_gap_cg =
        (spec.alpha * rep.hms_sq_profile + pert_sq -
         spec.beta * dipole_sq + 2.0 * rep.frostman_cg) /
        (2.0 * epsilon);
    rep.total_cg = rep.kinetic_modulated + rep.energy_gap_cg +
                   spec.beta * dipole_sq / epsilon + rep.com_velocity_term;
    rep.hms_lower_bound = rep.kinetic_modulated +
                          (1.0 - opts.kappa) * spec.alpha *
                              rep.hms_sq_profile / (2.0 * epsilon) +
                          rep.frostman_cg / epsilon;
  }
  return rep;
}

double r_eps_from_fields(const CoarseFields& fields,
                         const StrongSolutionSpec& strong, double t) {
  const BoxGrid& g = fields.density.grid;
  const Point V = strong.velocity(t);
  KahanSum acc;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double rho = fields.density.at(i, j);
      const double jx = fields.flux[0].at(i, j);
      const double jy = fields.flux[1].at(i, j);
      Point x{g.center_x(i), g.center_y(j), 0.0};
      // For rigid transport the forcing misfit d_t V + V.grad V + lambda V
      // - lambda u_ext collapses to minus the pressure gradient.
      const Point gp = strong.pressure_gradient(t, x);
      acc.add((rho * V[0] - jx) * -gp[0] + (rho * V[1] - jy) * -gp[1]);
    }
  }
  return acc.value() * g.cell_area();
}

GronwallReport gronwall_check(const std::vector<double>& times,
                              const std::vector<double>& H_totals,
                              const std::vector<double>& R_eps) {
  const size_t n = times.size();
  if (n < 2 || H_totals.size() != n || R_eps.size() != n)
    throw std::invalid_argument("gronwall_check: need aligned series");
  GronwallReport rep;
  rep.H0 = H_totals[0];
  rep.max_H = *std::max_element(H_totals.begin(), H_totals.end());
  std::vector<double> cum(n, 0.0);
  for (size_t k = 1; k < n; ++k) {
    const double dt = times[k] - times[k - 1];
    cum[k] = cum[k - 1] +
             0.5 * dt * (std::abs(R_eps[k - 1]) + std::abs(R_eps[k]));
  }
  rep.r_integral = cum[n - 1];
  rep.satisfied = true;
  double c_fit = 0.0;
  for (size_t k = 1; k < n; ++k) {
    const double bound = rep.H0 + cum[k];
    const double t = times[k] - times[0];
    if (bound <= 0.0) {
      if (H_totals[k] > 1e-14) rep.satisfied = false;
      continue;
    }
    if (H_totals[k] > bound && t > 0.0)
      c_fit = std::max(c_fit, std::log(H_totals[k] / bound) / t);
  }
  rep.C_fit = c_fit;
  if (!std::isfinite(c_fit)) rep.satisfied = false;
  return rep;
}

}  // namespace swarmlab
