#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "swarmlab/diagnostics.hpp"
#include "swarmlab/errors.hpp"

namespace swarmlab {

namespace {

// Cubic Hermite table for a radial potential, split at the support radius
// where the profile potential loses smoothness.
class RadialTable {
 public:
  RadialTable(std::vector<double> radii, std::vector<double> phi)
      : r_(std::move(radii)), phi_(std::move(phi)), slope_(r_.size(), 0.0) {
    const size_t n = r_.size();
    for (size_t k = 0; k < n; ++k) {
      if (k == 0)
        slope_[k] = (phi_[1] - phi_[0]) / (r_[1] - r_[0]);
      else if (k + 1 == n)
        slope_[k] = (phi_[n - 1] - phi_[n - 2]) / (r_[n - 1] - r_[n - 2]);
      else
        slope_[k] = (phi_[k + 1] - phi_[k - 1]) / (r_[k + 1] - r_[k - 1]);
    }
  }

  double eval(double r) const {
    if (r <= r_.front()) return phi_.front();
    if (r >= r_.back()) return phi_.back();
    size_t hi =
        std::upper_bound(r_.begin(), r_.end(), r) - r_.begin();
    const size_t lo = hi - 1;
    const double h = r_[hi] - r_[lo];
    const double u = (r - r_[lo]) / h;
    const double h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
    const double h10 = u * (1.0 - u) * (1.0 - u);
    const double h01 = u * u * (3.0 - 2.0 * u);
    const double h11 = u * u * (u - 1.0);
    return h00 * phi_[lo] + h * h10 * slope_[lo] + h01 * phi_[hi] +
           h * h11 * slope_[hi];
  }

 private:
  std::vector<double> r_;
  std::vector<double> phi_;
  std::vector<double> slope_;
};

bool radial_profile(const MinimizerProfile& prof) {
  return prof.variant == ProfileVariant::radial_indicator ||
         prof.variant == ProfileVariant::radial_power;
}

void validate_kernel(const KernelSpec& spec, double kappa) {
  if (spec.dim != 2)
    throw std::invalid_argument("coercivity_check supports dim == 2 only");
  if (spec.log_case())
    throw std::invalid_argument(
        "coercivity_check needs s < 1: the negative-Sobolev norm of a "
        "measure with mass is not defined at the endpoint");
  if (kappa < 0.0 || kappa >= 1.0)
    throw std::invalid_argument("coercivity_check: kappa must be in [0, 1)");
}

bool same_grid(const BoxGrid& a, const BoxGrid& b) {
  return a.origin == b.origin && a.spacing == b.spacing && a.nx == b.nx &&
         a.ny == b.ny;
}

}  // namespace

GridField profile_potential_field(const MinimizerProfile& profile,
                                  const Point& Xbar, const KernelSpec& spec,
                                  const BoxGrid& grid, double quad_tol) {
  GridField out = make_field(grid);
  if (radial_profile(profile)) {
    double r_max = 0.0;
    for (double cx : {grid.origin[0], grid.origin[0] + grid.extent_x()})
      for (double cy : {grid.origin[1], grid.origin[1] + grid.extent_y()})
        r_max = std::max(r_max, std::hypot(cx - Xbar[0], cy - Xbar[1]));
    const double R = profile.radius;
    std::vector<double> radii;
    const int n_in = 48;
    for (int k = 0; k < n_in; ++k)
      radii.push_back(std::min(R, r_max) * k / (n_in - 1));
    if (r_max > R) {
      const int n_out = 32;
      for (int k = 1; k <= n_out; ++k)
        radii.push_back(R + (r_max * 1.01 - R) * k / n_out);
    }
    std::vector<double> phi(radii.size());
    for (size_t k = 0; k < radii.size(); ++k)
      phi[k] = potential_at(profile, spec, Point{radii[k], 0.0, 0.0},
                            quad_tol);
    RadialTable table(std::move(radii), std::move(phi));
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) {
        const double dx = grid.center_x(i) - Xbar[0];
        const double dy = grid.center_y(j) - Xbar[1];
        out.at(i, j) = table.eval(std::hypot(dx, dy));
      }
  } else {
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) {
        const Point p{grid.center_x(i) - Xbar[0], grid.center_y(j) - Xbar[1],
                      0.0};
        out.at(i, j) = potential_at(profile, spec, p, quad_tol);
      }
  }
  return out;
}

CoercivityReference make_coercivity_reference(const MinimizerProfile& profile,
                                              const Point& Xbar,
                                              const KernelSpec& spec,
                                              const BoxGrid& grid,
                                              double quad_tol) {
  validate_kernel(spec, 0.0);
  CoercivityReference ref;
  ref.profile = profile;
  ref.Xbar = Xbar;
  ref.density = sample_field(grid, [&](double x, double y) {
    return profile.density(Point{x - Xbar[0], y - Xbar[1], 0.0});
  });
  ref.mass = ref.density.integral();
  if (!(ref.mass > 0.0))
    throw std::invalid_argument(
        "coercivity_check: reference support misses the grid");
  const std::array<double, 2> fm = ref.density.first_moment();
  ref.center = {fm[0] / ref.mass, fm[1] / ref.mass};

  ref.A0 = 2.0 * profile_energy(profile, spec, std::min(quad_tol, 1e-8)) /
           profile.mass;
  ref.potential = profile_potential_field(profile, Xbar, spec, grid, quad_tol);

  const double box = std::max(grid.extent_x(), grid.extent_y());
  ref.freqs =
      radial_log_frequencies(2.0 * kPi / box, kPi / grid.spacing, 96, 64);
  ref.hat_density = fourier_at(ref.density, ref.freqs);
  return ref;
}

CoercivityReport coercivity_check(const GridField& rho,
                                  const CoercivityReference& ref,
                                  const KernelSpec& spec, double kappa) {
  validate_kernel(spec, kappa);
  if (!same_grid(rho.grid, ref.density.grid))
    throw std::invalid_argument(
        "coercivity_check: measure grid differs from the reference grid");

  const BoxGrid& g = rho.grid;
  const double h2 = g.cell_area();
  const double m = rho.integral();
  if (!(m > 0.0))
    throw std::invalid_argument("coercivity_check: measure has no mass");
  if (std::abs(m - ref.profile.mass) > 1e-8 * std::max(1.0, ref.profile.mass))
    throw std::invalid_argument(
        "coercivity_check: measure and reference mass differ");
  double min_val = 0.0;
  double max_val = 0.0;
  for (double v : rho.values) {
    min_val = std::min(min_val, v);
    max_val = std::max(max_val, v);
  }
  if (min_val < -1e-12 * std::max(1.0, max_val))
    throw std::invalid_argument("coercivity_check: measure must be nonnegative");

  CoercivityReport rep;

  // Moments of rho against the sampled reference, renormalized to the same
  // mass so the difference has exactly zero mass on the grid.
  const std::array<double, 2> fm = rho.first_moment();
  const double X[2] = {fm[0] / m, fm[1] / m};
  const double scale = m / ref.mass;
  const double Xb[2] = {ref.center[0], ref.center[1]};

  double anisotropic_moment = 0.0;  // integral of sum_j (x_j-X_j)^2/lambda_j^2
  double com_gap = 0.0;             // sum_j (X_j - Xbar_j)^2 / lambda_j^2
  for (int j = 0; j < 2; ++j) {
    const double lam2 = spec.lambda[j] * spec.lambda[j];
    anisotropic_moment += rho.second_moment_axis(j, X[j]) / lam2;
    const double dx = X[j] - Xb[j];
    com_gap += dx * dx / lam2;
  }
  const double wa_energy = m * anisotropic_moment;
  rep.com_term = spec.beta * m * m * com_gap;

  // One Fourier representation drives every interaction term, so both
  // inequalities reduce to the pointwise-nonnegative perturbation integrand.
  const std::vector<std::complex<double>> hat_rho = fourier_at(rho, ref.freqs);
  const double inv_2pi_sq = 1.0 / (4.0 * kPi * kPi);
  KahanSum es_rho, es_mu, slack_rho, slack_mu;
  for (size_t k = 0; k < ref.freqs.size(); ++k) {
    const double r = std::hypot(ref.freqs[k].xi1, ref.freqs[k].xi2);
    const double symbol = Es_fourier(spec.s, r);
    const double pert = w_hat(spec, r);
    const double combo = kappa * spec.alpha * symbol + pert;
    const double p_rho = std::norm(hat_rho[k]);
    const double p_mu = std::norm(hat_rho[k] - scale * ref.hat_density[k]);
    const double wk = ref.freqs[k].weight * inv_2pi_sq;
    es_rho.add(wk * symbol * p_rho);
    es_mu.add(wk * symbol * p_mu);
    slack_rho.add(wk * combo * p_rho);
    slack_mu.add(wk * combo * p_mu);
  }
  rep.hms_sq_mu = es_mu.value();

  rep.rhs0 = spec.beta * wa_energy +
             spec.alpha * (1.0 - kappa) * es_rho.value();
  rep.lhs0 = rep.rhs0 + slack_rho.value();
  rep.holds0 =
      rep.lhs0 - rep.rhs0 >= -rep.slack_tol * std::max(1.0, std::abs(rep.lhs0));

  // Frostman integral of (Phi_bar - A0) d rho from the cached samples.
  KahanSum frost;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double val = rho.at(i, j);
      if (val == 0.0) continue;
      frost.add(val * (ref.potential.at(i, j) - ref.A0));
    }
  rep.frostman_integral = frost.value() * h2;

  rep.rhs = 2.0 * rep.frostman_integral +
            spec.alpha * (1.0 - kappa) * es_mu.value();
  rep.lhs = rep.rhs + slack_mu.value();
  rep.holds =
      rep.lhs - rep.rhs >= -rep.slack_tol * std::max(1.0, std::abs(rep.lhs));
  return rep;
}

CoercivityReport coercivity_check(const GridField& rho,
                                  const MinimizerProfile& reference,
                                  const Point& Xbar, const KernelSpec& spec,
                                  double kappa, double quad_tol) {
  validate_kernel(spec, kappa);
  return coercivity_check(
      rho, make_coercivity_reference(reference, Xbar, spec, rho.grid, quad_tol),
      spec, kappa);
}

}  // namespace swarmlab
