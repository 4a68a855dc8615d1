// Small numerical toolbox: Gauss-Legendre rules, adaptive quadrature,
// compensated summation, special-function helpers, dense little matrices,
// and a deterministic random number generator.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace swarmlab {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr int kMaxDim = 3;

// Spatial point or vector; entries beyond the active dimension stay zero.
using Point = std::array<double, kMaxDim>;

inline double dot(const Point& a, const Point& b, int dim) {
  double t = 0.0;
  for (int j = 0; j < dim; ++j) t += a[j] * b[j];
  return t;
}
inline double norm_sq(const Point& a, int dim) { return dot(a, a, dim); }

// Gauss-Legendre nodes and weights on [-1, 1], cached per order.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int order);

// Fixed-order Gauss-Legendre integral of f over [a, b].
double gauss_integrate(const std::function<double(double)>& f,
                       double a, double b, int order = 16);

// Adaptive bisection quadrature with an embedded GL7/GL15 error estimate.
// Integrable endpoint singularities converge through subdivision; callers
// should still split at interior kinks they know about.
double adaptive_integrate(const std::function<double(double)>& f,
                          double a, double b,
                          double rel_tol = 1e-10, double abs_tol = 1e-14,
                          int max_depth = 48);

// Composite Gauss rule with panel doubling until the relative change
// between refinements drops below rel_tol. Suited to smooth periodic
// integrands such as angular kernels.
double doubling_integrate(const std::function<double(double)>& f,
                          double a, double b,
                          double rel_tol = 1e-12, int max_panels = 1 << 14);

// Tanh-sinh quadrature on (a, b). Converges at a double-exponential rate
// for integrands that are analytic inside the interval, including ones
// with integrable algebraic or logarithmic endpoint singularities, which
// defeat panel subdivision. Non-finite samples next to an endpoint are
// dropped; their true contribution is below the truncation level.
double tanh_sinh_integrate(const std::function<double(double)>& f,
                           double a, double b,
                           double rel_tol = 1e-12, int max_level = 8);

// Compensated (Kahan-Neumaier) accumulator.
class KahanSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }
  void reset() { sum_ = 0.0; comp_ = 0.0; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Beta function through lgamma, safe for moderately large arguments.
double beta_function(double a, double b);

// Surface measure of the unit sphere in R^dim.
double unit_sphere_area(int dim);

// Dense row-major n-by-n matrix, sized for the small systems used here.
struct SmallMatrix {
  int n = 0;
  std::vector<double> a;

  explicit SmallMatrix(int size = 0) : n(size), a(size * size, 0.0) {}
  double& operator()(int i, int j) { return a[i * n + j]; }
  double operator()(int i, int j) const { return a[i * n + j]; }
  static SmallMatrix identity(int size);
};

SmallMatrix mat_mul(const SmallMatrix& x, const SmallMatrix& y);
std::vector<double> mat_vec(const SmallMatrix& x, const std::vector<double>& v);
// Matrix exponential by scaling and squaring with a Taylor core.
SmallMatrix mat_exp(const SmallMatrix& x);
// Solves a small linear system in place by partial-pivot elimination.
std::vector<double> solve_linear(SmallMatrix x, std::vector<double> b);

// Deterministic RNG. The mt19937_64 engine is pinned by the standard; the
// distribution transforms are written out by hand because the standard
// library ones are implementation defined, and runs must reproduce bit for
// bit from a seed anywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  double normal();  // standard normal, polar Box-Muller
  std::uint64_t integer() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace swarmlab
