#include "swarmlab/kernels.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "swarmlab/numerics.hpp"

namespace swarmlab {

void KernelSpec::validate() const {
  if (dim < 1 || dim > kMaxDim)
    throw std::invalid_argument("kernel: dim must be 1, 2 or 3");
  if (!(s > 0.0) || 2.0 * s > static_cast<double>(dim))
    throw std::invalid_argument("kernel: s must lie in (0, dim/2]");
  if (!(alpha >= 0.0) || !(beta >= 0.0))
    throw std::invalid_argument("kernel: alpha and beta must be nonnegative");
  for (int j = 0; j < dim; ++j)
    if (!(lambda[j] > 0.0))
      throw std::invalid_argument("kernel: lambda entries must be positive");
  if (!(delta >= 0.0))
    throw std::invalid_argument("kernel: delta must be nonnegative");
  if (perturbation.kind == PerturbationKind::gaussian &&
      !(perturbation.sigma_w > 0.0))
    throw std::invalid_argument("kernel: sigma_w must be positive");
}

double sigma_constant(int dim, double s) {
  if (!(s > 0.0) || 2.0 * s >= static_cast<double>(dim))
    throw std::domain_error("sigma_constant: needs 0 < s < dim/2");
  double n = static_cast<double>(dim);
  return std::tgamma(0.5 * n - s) /
         (std::pow(4.0, s) * std::tgamma(s) * std::pow(kPi, 0.5 * n));
}

namespace {

double norm2_delta(const KernelSpec& k, const double* x) {
  double r2 = k.delta * k.delta;
  for (int j = 0; j < k.dim; ++j) r2 += x[j] * x[j];
  return r2;
}

double gaussian_w(const PerturbationSpec& p, double r2) {
  return p.c * std::exp(-0.5 * r2 / (p.sigma_w * p.sigma_w));
}

}  // namespace

double eval_Es(const KernelSpec& k, const double* x) {
  double r2 = norm2_delta(k, x);
  if (k.log_case()) return -std::log(r2) / (4.0 * kPi);
  double sigma = sigma_constant(k.dim, k.s);
  return sigma * std::pow(r2, 0.5 * (2.0 * k.s - k.dim));
}

void grad_Es(const KernelSpec& k, const double* x, double* g) {
  double r2 = norm2_delta(k, x);
  double radial;
  if (k.log_case()) {
    radial = -1.0 / (2.0 * kPi * r2);
  } else {
    double sigma = sigma_constant(k.dim, k.s);
    double expo = 2.0 * k.s - k.dim;
    radial = sigma * expo * std::pow(r2, 0.5 * expo - 1.0);
  }
  for (int j = 0; j < k.dim; ++j) g[j] = radial * x[j];
}

double eval_W(const KernelSpec& k, const double* x) {
  double v = k.alpha * eval_Es(k, x);
  double r2 = 0.0;
  for (int j = 0; j < k.dim; ++j) {
    v += k.beta * x[j] * x[j] / (2.0 * k.lambda[j] * k.lambda[j]);
    r2 += x[j] * x[j];
  }
  if (k.perturbation.kind == PerturbationKind::gaussian)
    v += gaussian_w(k.perturbation, r2);
  return v;
}

void grad_W(const KernelSpec& k, const double* x, double* g) {
  grad_Es(k, x, g);
  double r2 = 0.0;
  for (int j = 0; j < k.dim; ++j) r2 += x[j] * x[j];
  double gauss_radial = 0.0;
  if (k.perturbation.kind == PerturbationKind::gaussian) {
    double sw2 = k.perturbation.sigma_w * k.perturbation.sigma_w;
    gauss_radial = -gaussian_w(k.perturbation, r2) / sw2;
  }
  for (int j = 0; j < k.dim; ++j) {
    g[j] = k.alpha * g[j] +
           k.beta * x[j] / (k.lambda[j] * k.lambda[j]) +
           gauss_radial * x[j];
  }
}

double Es_fourier(double s, double xi_norm) {
  return std::pow(xi_norm, -2.0 * s);
}

double w_hat(const KernelSpec& k, double xi_norm) {
  switch (k.perturbation.kind) {
    case PerturbationKind::none:
      return 0.0;
    case PerturbationKind::gaussian: {
      double sw = k.perturbation.sigma_w;
      double amp = k.perturbation.c *
                   std::pow(2.0 * kPi * sw * sw, 0.5 * k.dim);
      return amp * std::exp(-0.5 * sw * sw * xi_norm * xi_norm);
    }
  }
  return 0.0;
}

double kappa_min(const KernelSpec& k) {
  if (k.perturbation.kind == PerturbationKind::none) return 0.0;
  if (k.perturbation.c >= 0.0) return 0.0;
  if (!(k.alpha > 0.0))
    throw std::domain_error("kappa_min: negative perturbation needs alpha > 0");
  // For the Gaussian, sup_xi (-w_hat(xi)) |xi|^(2s) / alpha is attained at
  // |xi|^2 = 2 s / sigma_w^2, giving a closed form.
  double sw = k.perturbation.sigma_w;
  double amp = -k.perturbation.c * std::pow(2.0 * kPi * sw * sw, 0.5 * k.dim);
  return amp * std::pow(2.0 * k.s / (sw * sw), k.s) * std::exp(-k.s) / k.alpha;
}

H2bReport check_H2b(const KernelSpec& k, double kappa) {
  H2bReport rep;
  rep.kappa = kappa;
  rep.kappa_required = kappa_min(k);
  rep.holds = (kappa >= rep.kappa_required && kappa < 1.0);
  // Grid scan over a wide logarithmic band, plus the analytic worst point.
  double worst = std::numeric_limits<double>::infinity();
  double worst_xi = 0.0;
  auto margin = [&](double xi) {
    return w_hat(k, xi) + kappa * k.alpha * Es_fourier(k.s, xi);
  };
  const int n = 2048;
  for (int i = 0; i <= n; ++i) {
    double xi = std::pow(10.0, -3.0 + 6.0 * i / n);
    double m = margin(xi);
    if (m < worst) {
      worst = m;
      worst_xi = xi;
    }
  }
  if (k.perturbation.kind == PerturbationKind::gaussian &&
      k.perturbation.c < 0.0) {
    double xi_star = std::sqrt(2.0 * k.s) / k.perturbation.sigma_w;
    double m = margin(xi_star);
    if (m < worst) {
      worst = m;
      worst_xi = xi_star;
    }
  }
  rep.worst_margin = worst;
  rep.worst_xi = worst_xi;
  if (worst < 0.0) rep.holds = false;
  return rep;
}

PairKernel make_pair_kernel(const KernelSpec& k) {
  PairKernel pk;
  pk.dim = k.dim;
  pk.delta2 = k.delta * k.delta;
  if (k.log_case()) {
    pk.log_part = true;
    pk.log_coef = -k.alpha / (2.0 * kPi);
  } else {
    double sigma = sigma_constant(k.dim, k.s);
    double expo = 2.0 * k.s - k.dim;
    pk.riesz_coef = k.alpha * sigma * expo;
    pk.riesz_expo = 0.5 * expo - 1.0;
  }
  for (int j = 0; j < k.dim; ++j)
    pk.quad_coef[j] = k.beta / (k.lambda[j] * k.lambda[j]);
  if (k.perturbation.kind == PerturbationKind::gaussian) {
    pk.has_gauss = true;
    double sw2 = k.perturbation.sigma_w * k.perturbation.sigma_w;
    pk.gauss_coef = -k.perturbation.c / sw2;
    pk.inv_two_sw2 = 0.5 / sw2;
  }
  return pk;
}

}  // namespace swarmlab
