// Interaction kernel W(x) = alpha*E_s(x) + beta*W_a(x) + w(x), where E_s is
// the attractive Riesz kernel, W_a(x) = sum_j x_j^2 / (2 lambda_j^2) is the
// anisotropic repulsive confinement, and w is an optional bounded
// perturbation. At the endpoint 2s = N the singular part degenerates to the
// logarithmic kernel -(1/(2 pi)) ln|x|.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>

#include "swarmlab/numerics.hpp"

namespace swarmlab {

enum class PerturbationKind { none, gaussian };

struct PerturbationSpec {
  PerturbationKind kind = PerturbationKind::none;
  double c = 0.0;        // amplitude, may be negative
  double sigma_w = 1.0;  // Gaussian width
};

struct KernelSpec {
  int dim = 2;
  double s = 1.0;
  double alpha = 1.0;
  double beta = 1.0;
  std::array<double, kMaxDim> lambda{1.0, 1.0, 1.0};
  PerturbationSpec perturbation{};
  double delta = 0.0;  // blob width; regularizes the singular part only

  // Exact endpoint test: configs carry s = N/2 exactly when they mean it.
  bool log_case() const { return 2.0 * s == static_cast<double>(dim); }
  double lambda_inv_sq_sum() const {
    double t = 0.0;
    for (int j = 0; j < dim; ++j) t += 1.0 / (lambda[j] * lambda[j]);
    return t;
  }
  // Throws std::invalid_argument on out-of-range parameters.
  void validate() const;
};

// Normalization sigma(N, s) of the Riesz kernel sigma |x|^(2s-N), chosen so
// that its Fourier transform is |xi|^(-2s). Requires 0 < s < N/2.
double sigma_constant(int dim, double s);

// Singular part alone, with blob regularization |x|_delta.
double eval_Es(const KernelSpec& k, const double* x);
void grad_Es(const KernelSpec& k, const double* x, double* g);

// Full kernel and its gradient. The quadratic and perturbation parts are
// smooth and never regularized.
double eval_W(const KernelSpec& k, const double* x);
void grad_W(const KernelSpec& k, const double* x, double* g);

// Fourier symbols (convention: integral of e^{-i x.xi} f(x) dx).
double Es_fourier(double s, double xi_norm);  // |xi|^(-2s), also the log case
double w_hat(const KernelSpec& k, double xi_norm);

// Hypothesis check for the perturbation: w_hat(xi) + kappa * alpha *
// |xi|^(-2s) >= 0 for all xi != 0, with some kappa in [0, 1).
struct H2bReport {
  bool holds = false;
  double kappa = 0.0;           // the kappa that was tested
  double kappa_required = 0.0;  // smallest admissible kappa
  double worst_margin = 0.0;    // min over xi of the tested combination
  double worst_xi = 0.0;
};
H2bReport check_H2b(const KernelSpec& k, double kappa);

// Smallest admissible kappa in closed form (exact for the Gaussian family,
// zero when there is no perturbation).
double kappa_min(const KernelSpec& k);

// Precomputed per-pair force constants for the inner simulation loop.
// accumulate_pair_force adds grad_W(d) into g without re-reading the spec.
struct PairKernel {
  int dim = 2;
  bool log_part = false;
  double log_coef = 0.0;    // -alpha / (2 pi), applied as coef / r2
  double riesz_coef = 0.0;  // alpha sigma (2s - N)
  double riesz_expo = 0.0;  // (2s - N)/2 - 1, exponent on r2
  std::array<double, kMaxDim> quad_coef{};  // beta / lambda_j^2
  bool has_gauss = false;
  double gauss_coef = 0.0;  // -c / sigma_w^2
  double inv_two_sw2 = 0.0;
  double delta2 = 0.0;
};
PairKernel make_pair_kernel(const KernelSpec& k);

inline void accumulate_grad_W(const PairKernel& pk, const double* d,
                              double* g) {
  double r2 = pk.delta2;
  for (int j = 0; j < pk.dim; ++j) r2 += d[j] * d[j];
  double radial;
  if (pk.log_part)
    radial = pk.log_coef / r2;
  else
    radial = pk.riesz_coef * std::pow(r2, pk.riesz_expo);
  if (pk.has_gauss) {
    double r2s = r2 - pk.delta2;
    radial += pk.gauss_coef * std::exp(-r2s * pk.inv_two_sw2);
  }
  for (int j = 0; j < pk.dim; ++j)
    g[j] += radial * d[j] + pk.quad_coef[j] * d[j];
}

}  // namespace swarmlab
