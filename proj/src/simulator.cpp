#include "swarmlab/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "swarmlab/errors.hpp"

namespace swarmlab {

Point ExternalFieldSpec::eval(const Point& x, int dim) const {
  Point u{};
  switch (kind) {
    case FieldKind::zero:
      break;
    case FieldKind::constant:
      for (int j = 0; j < dim; ++j) u[j] = offset[j];
      break;
    case FieldKind::linear:
      for (int j = 0; j < dim; ++j) {
        double acc = offset[j];
        for (int k = 0; k < dim; ++k) acc += matrix[j * kMaxDim + k] * x[k];
        u[j] = acc;
      }
      break;
    case FieldKind::rotation:
      u[0] = -omega * x[1];
      u[1] = omega * x[0];
      break;
  }
  return u;
}

double ExternalFieldSpec::lipschitz_bound(int dim) const {
  switch (kind) {
    case FieldKind::zero:
    case FieldKind::constant:
      return 0.0;
    case FieldKind::rotation:
      return std::abs(omega);
    case FieldKind::linear: {
      // Largest singular value by power iteration on A^T A.
      std::array<double, kMaxDim> v{};
      v[0] = 1.0;
      for (int j = 1; j < dim; ++j) v[j] = 0.5 / (j + 1);
      double sigma = 0.0;
      for (int it = 0; it < 200; ++it) {
        std::array<double, kMaxDim> av{}, atav{};
        for (int r = 0; r < dim; ++r)
          for (int c = 0; c < dim; ++c) av[r] += matrix[r * kMaxDim + c] * v[c];
        for (int c = 0; c < dim; ++c)
          for (int r = 0; r < dim; ++r)
            atav[c] += matrix[r * kMaxDim + c] * av[r];
        double nrm = 0.0;
        for (int j = 0; j < dim; ++j) nrm += atav[j] * atav[j];
        nrm = std::sqrt(nrm);
        if (nrm == 0.0) return 0.0;
        for (int j = 0; j < dim; ++j) v[j] = atav[j] / nrm;
        sigma = std::sqrt(nrm);
      }
      return sigma;
    }
  }
  return 0.0;
}

bool ExternalFieldSpec::symmetric_linear(int dim, double tol) const {
  if (kind != FieldKind::linear) return false;
  for (int r = 0; r < dim; ++r)
    for (int c = r + 1; c < dim; ++c)
      if (std::abs(matrix[r * kMaxDim + c] - matrix[c * kMaxDim + r]) > tol)
        return false;
  return true;
}

void ExternalFieldSpec::validate(int dim) const {
  auto finite = [](double v) { return std::isfinite(v); };
  for (int j = 0; j < dim; ++j)
    if (!finite(offset[j])) throw ConfigError("external field: non-finite offset");
  if (kind == FieldKind::linear) {
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c)
        if (!finite(matrix[r * kMaxDim + c]))
          throw ConfigError("external field: non-finite matrix entry");
  }
  if (kind == FieldKind::rotation) {
    if (!finite(omega)) throw ConfigError("external field: non-finite rate");
    if (dim != 2) throw ConfigError("rotation field requires dim = 2");
  }
}

double SimConfig::dt_stability_bound() const {
  // Documented constant c_dt = 0.3; the interaction scale combines the
  // quadratic spring constant with the repulsion amplitude so the fastest
  // oscillation frequency is ~ sqrt(scale / epsilon).
  const double c_dt = 0.3;
  double scale = kernel.alpha + kernel.beta * kernel.lambda_inv_sq_sum();
  return c_dt * std::sqrt(epsilon / std::max(scale, 1e-12));
}

void SimConfig::validate() const {
  kernel.validate();
  external_field.validate(kernel.dim);
  if (!(epsilon > 0.0)) throw ConfigError("simulation: epsilon must be > 0");
  if (lambda_drag < 0.0) throw ConfigError("simulation: lambda_drag < 0");
  if (!(dt > 0.0)) throw ConfigError("simulation: dt must be > 0");
  if (!(t_final >= 0.0)) throw ConfigError("simulation: t_final < 0");
  if (dt > dt_stability_bound() * (1.0 + 1e-12))
    throw ConfigError("simulation: dt exceeds the stability bound " +
                      std::to_string(dt_stability_bound()));
}

namespace {

struct SupportBox {
  std::array<double, 2> lo{};
  std::array<double, 2> hi{};
};

SupportBox profile_bounding_box(const MinimizerProfile& prof) {
  SupportBox box;
  switch (prof.variant) {
    case ProfileVariant::ellipsoid_2d:
      box.lo = {-prof.semi_axes[0], -prof.semi_axes[1]};
      box.hi = {prof.semi_axes[0], prof.semi_axes[1]};
      break;
    case ProfileVariant::one_dim:
      box.lo = {-prof.radius, 0.0};
      box.hi = {prof.radius, 0.0};
      break;
    default:
      box.lo = {-prof.radius, -prof.radius};
      box.hi = {prof.radius, prof.radius};
      break;
  }
  return box;
}

}  // namespace

ParticleEnsemble well_prepared_initial_data(const MinimizerProfile& profile,
                                            const Point& X_init,
                                            const VelocityField& V_field,
                                            int n, double thermal,
                                            std::uint64_t seed) {
  profile.validate();
  if (profile.variant == ProfileVariant::particle_cloud)
    throw std::invalid_argument(
        "well_prepared_initial_data: needs an analytic profile");
  if (n < 1) throw std::invalid_argument("well_prepared_initial_data: n < 1");
  if (thermal < 0.0)
    throw std::invalid_argument("well_prepared_initial_data: thermal < 0");
  if (!(profile.bounding_radius() > 0.0))
    throw std::runtime_error(
        "well_prepared_initial_data: degenerate bounding box");

  const int dim = profile.dim;
  SupportBox box = profile_bounding_box(profile);
  Rng rng(seed);

  // Stratify the bounding box, allocate per-stratum counts proportional to
  // the sampled stratum mass (largest-remainder rounding), then run plain
  // rejection inside each stratum against the global density bound.
  const int strata = (dim == 1) ? 64 : 16;
  const int sx = strata;
  const int sy = (dim == 1) ? 1 : strata;
  std::vector<double> mass(static_cast<size_t>(sx) * sy, 0.0);
  const double wx = (box.hi[0] - box.lo[0]) / sx;
  const double wy = (dim == 1) ? 1.0 : (box.hi[1] - box.lo[1]) / sy;
  double total = 0.0;
  for (int jy = 0; jy < sy; ++jy)
    for (int jx = 0; jx < sx; ++jx) {
      double acc = 0.0;
      const int probes = 4;
      for (int py = 0; py < (dim == 1 ? 1 : probes); ++py)
        for (int px = 0; px < probes; ++px) {
          Point q{};
          q[0] = box.lo[0] + (jx + (px + 0.5) / probes) * wx;
          if (dim > 1) q[1] = box.lo[1] + (jy + (py + 0.5) / probes) * wy;
          acc += profile.density(q);
        }
      mass[static_cast<size_t>(jy) * sx + jx] = acc;
      total += acc;
    }
  if (!(total > 0.0))
    throw std::runtime_error("well_prepared_initial_data: zero sampled mass");

  std::vector<int> counts(mass.size(), 0);
  std::vector<std::pair<double, size_t>> remainders;
  int assigned = 0;
  for (size_t k = 0; k < mass.size(); ++k) {
    double ideal = n * mass[k] / total;
    counts[k] = static_cast<int>(std::floor(ideal));
    assigned += counts[k];
    remainders.push_back({ideal - counts[k], k});
  }
  std::sort(remainders.begin(), remainders.end(),
            [](const auto& a, const auto& b) {
              if (a.first != b.first) return a.first > b.first;
              return a.second < b.second;
            });
  for (int i = 0; assigned < n; ++i, ++assigned)
    counts[remainders[static_cast<size_t>(i) % remainders.size()].second]++;

  const double bound = profile.amplitude;
  ParticleEnsemble ens;
  ens.dim = dim;
  ens.weight = profile.mass / n;
  ens.positions.reserve(static_cast<size_t>(n));
  for (int jy = 0; jy < sy; ++jy)
    for (int jx = 0; jx < sx; ++jx) {
      int want = counts[static_cast<size_t>(jy) * sx + jx];
      long tries = 0;
      while (want > 0) {
        if (++tries > 200000L * want)
          throw std::runtime_error(
              "well_prepared_initial_data: rejection sampling stalled");
        Point q{};
        q[0] = box.lo[0] + (jx + rng.uniform()) * wx;
        if (dim > 1) q[1] = box.lo[1] + (jy + rng.uniform()) * wy;
        double rho = profile.density(q);
        if (rho <= 0.0) continue;
        if (rng.uniform() * bound <= rho) {
          Point x{};
          for (int d = 0; d < dim; ++d) x[d] = q[d] + X_init[d];
          ens.positions.push_back(x);
          --want;
        }
      }
    }

  ens.velocities.resize(ens.positions.size());
  for (size_t i = 0; i < ens.positions.size(); ++i) {
    Point v = V_field(ens.positions[i]);
    for (int d = 0; d < dim; ++d) v[d] += thermal * rng.normal();
    ens.velocities[i] = v;
  }
  return ens;
}

void compute_forces(const ParticleEnsemble& state, const SimConfig& cfg,
                    std::vector<Point>& out) {
  const int n = state.size();
  const int dim = state.dim;
  out.assign(static_cast<size_t>(n), Point{});
  PairKernel pk = make_pair_kernel(cfg.kernel);
  const double scale = -state.weight / cfg.epsilon;
  for (int i = 0; i < n; ++i) {
    const Point& xi = state.positions[static_cast<size_t>(i)];
    for (int j = i + 1; j < n; ++j) {
      const Point& xj = state.positions[static_cast<size_t>(j)];
      double d[kMaxDim];
      for (int k = 0; k < dim; ++k) d[k] = xi[k] - xj[k];
      double g[kMaxDim] = {0.0, 0.0, 0.0};
      accumulate_grad_W(pk, d, g);
      // Antisymmetric pair update: internal forces cancel exactly.
      for (int k = 0; k < dim; ++k) {
        out[static_cast<size_t>(i)][k] += scale * g[k];
        out[static_cast<size_t>(j)][k] -= scale * g[k];
      }
    }
  }
}

namespace {

void apply_drag(ParticleEnsemble& state, const SimConfig& cfg,
                double half_dt) {
  if (cfg.lambda_drag == 0.0) return;
  const int dim = state.dim;
  const double decay = std::exp(-cfg.lambda_drag * half_dt);
  for (int i = 0; i < state.size(); ++i) {
    Point u = cfg.external_field.eval(state.positions[static_cast<size_t>(i)],
                                      dim);
    Point& v = state.velocities[static_cast<size_t>(i)];
    for (int k = 0; k < dim; ++k) v[k] = u[k] + (v[k] - u[k]) * decay;
  }
}

bool state_finite(const ParticleEnsemble& state) {
  double acc = 0.0;
  for (int i = 0; i < state.size(); ++i) {
    acc += norm_sq(state.positions[static_cast<size_t>(i)], state.dim);
    acc += norm_sq(state.velocities[static_cast<size_t>(i)], state.dim);
  }
  return std::isfinite(acc);
}

[[noreturn]] void abort_unstable(const char* substep, double t) {
  throw InstabilityError(std::string("non-finite state after ") + substep +
                         " substep at t = " + std::to_string(t));
}

}  // namespace

void step(ParticleEnsemble& state, const SimConfig& cfg, StepWorkspace& ws) {
  const int n = state.size();
  const int dim = state.dim;
  const double dt = cfg.dt;

  apply_drag(state, cfg, 0.5 * dt);
  if (!state_finite(state)) abort_unstable("drag", state.time);

  // Velocity-Verlet kick-drift-kick; the closing force evaluation seeds the
  // next step's opening kick (positions are untouched by the drag halves).
  if (!ws.forces_valid) {
    compute_forces(state, cfg, ws.forces);
    ws.forces_valid = true;
  }
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < dim; ++k)
      state.velocities[static_cast<size_t>(i)][k] +=
          0.5 * dt * ws.forces[static_cast<size_t>(i)][k];
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < dim; ++k)
      state.positions[static_cast<size_t>(i)][k] +=
          dt * state.velocities[static_cast<size_t>(i)][k];
  compute_forces(state, cfg, ws.forces);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < dim; ++k)
      state.velocities[static_cast<size_t>(i)][k] +=
          0.5 * dt * ws.forces[static_cast<size_t>(i)][k];
  if (!state_finite(state)) abort_unstable("kick-drift", state.time);

  apply_drag(state, cfg, 0.5 * dt);
  if (!state_finite(state)) abort_unstable("closing drag", state.time);

  state.time += dt;
}

double ensemble_interaction_energy(const ParticleEnsemble& state,
                                   const KernelSpec& kernel) {
  const int n = state.size();
  const int dim = state.dim;
  KahanSum sum;
  for (int i = 0; i < n; ++i) {
    const Point& xi = state.positions[static_cast<size_t>(i)];
    for (int j = i + 1; j < n; ++j) {
      double d[kMaxDim];
      for (int k = 0; k < dim; ++k)
        d[k] = xi[k] - state.positions[static_cast<size_t>(j)][k];
      sum.add(eval_W(kernel, d));
    }
  }
  return 2.0 * state.weight * state.weight * sum.value();
}

ObservableRecord observables(const ParticleEnsemble& state,
                             const SimConfig& cfg, double energy_reference) {
  ObservableRecord rec;
  const int n = state.size();
  const int dim = state.dim;
  rec.time = state.time;
  rec.mass = state.mass();
  KahanSum kin, sec;
  std::array<KahanSum, kMaxDim> xs, vs;
  for (int i = 0; i < n; ++i) {
    const Point& x = state.positions[static_cast<size_t>(i)];
    const Point& v = state.velocities[static_cast<size_t>(i)];
    kin.add(norm_sq(v, dim));
    sec.add(norm_sq(x, dim));
    for (int k = 0; k < dim; ++k) {
      xs[static_cast<size_t>(k)].add(x[k]);
      vs[static_cast<size_t>(k)].add(v[k]);
    }
  }
  for (int k = 0; k < dim; ++k) {
    rec.X_eps[k] = xs[static_cast<size_t>(k)].value() / n;
    rec.V_eps[k] = vs[static_cast<size_t>(k)].value() / n;
  }
  rec.kinetic_energy = 0.5 * state.weight * kin.value();
  rec.second_moment = state.weight * sec.value();
  rec.interaction_energy = ensemble_interaction_energy(state, cfg.kernel);
  rec.total_energy_H =
      rec.kinetic_energy +
      (rec.interaction_energy - energy_reference) / (2.0 * cfg.epsilon);
  return rec;
}

CoarseFields coarse_grain(const ParticleEnsemble& state, const BoxGrid& grid,
                          double bandwidth) {
  if (!(bandwidth > 0.0))
    throw std::invalid_argument("coarse_grain: bandwidth must be > 0");
  if (state.dim != 2)
    throw std::invalid_argument("coarse_grain: grids are 2-D");
  CoarseFields out;
  out.time = state.time;
  out.bandwidth = bandwidth;
  out.density = make_field(grid);
  out.flux[0] = make_field(grid);
  out.flux[1] = make_field(grid);

  const double inv2b2 = 1.0 / (2.0 * bandwidth * bandwidth);
  const double norm = state.weight / (2.0 * kPi * bandwidth * bandwidth);
  const double reach = 5.0 * bandwidth;
  const double h = grid.spacing;

  for (int p = 0; p < state.size(); ++p) {
    const Point& x = state.positions[static_cast<size_t>(p)];
    const Point& v = state.velocities[static_cast<size_t>(p)];
    int i0 = static_cast<int>(std::floor((x[0] - reach - grid.origin[0]) / h));
    int i1 = static_cast<int>(std::ceil((x[0] + reach - grid.origin[0]) / h));
    int j0 = static_cast<int>(std::floor((x[1] - reach - grid.origin[1]) / h));
    int j1 = static_cast<int>(std::ceil((x[1] + reach - grid.origin[1]) / h));
    i0 = std::max(i0, 0);
    j0 = std::max(j0, 0);
    i1 = std::min(i1, grid.nx - 1);
    j1 = std::min(j1, grid.ny - 1);
    for (int j = j0; j <= j1; ++j) {
      double dy = grid.center_y(j) - x[1];
      for (int i = i0; i <= i1; ++i) {
        double dx = grid.center_x(i) - x[0];
        double g = norm * std::exp(-(dx * dx + dy * dy) * inv2b2);
        out.density.at(i, j) += g;
        out.flux[0].at(i, j) += g * v[0];
        out.flux[1].at(i, j) += g * v[1];
      }
    }
  }

  double captured = out.density.integral();
  out.mass_outside_fraction = 1.0 - captured / state.mass();
  if (out.mass_outside_fraction > 1e-3)
    throw InstabilityError(
        "coarse_grain: " + std::to_string(100.0 * out.mass_outside_fraction) +
        "% of the mass falls outside the grid");
  return out;
}

double default_bandwidth(const MinimizerProfile& profile, int n) {
  double r = profile.bounding_radius();
  return 0.8 * r * std::pow(static_cast<double>(std::max(n, 2)), -0.25);
}

double default_blob_width(double support_radius, int n, int dim,
                          double c_delta) {
  return c_delta * support_radius *
         std::pow(static_cast<double>(std::max(n, 2)),
                  -1.0 / static_cast<double>(dim));
}

}  // namespace swarmlab
