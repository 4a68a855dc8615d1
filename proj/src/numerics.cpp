#include "swarmlab/numerics.hpp"

#include <map>
#include <mutex>
#include <stdexcept>

namespace swarmlab {

namespace {

GaussRule compute_gauss(int order) {
  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  // Newton iteration on Legendre polynomials, symmetric pairs.
  for (int i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (order + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = order * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  return rule;
}

double panel_integrate(const std::function<double(double)>& f,
                       double a, double b, const GaussRule& rule) {
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  KahanSum acc;
  for (size_t i = 0; i < rule.nodes.size(); ++i)
    acc.add(rule.weights[i] * f(mid + half * rule.nodes[i]));
  return half * acc.value();
}

struct AdaptiveCtx {
  const std::function<double(double)>* f;
  const GaussRule* low;
  const GaussRule* high;
  double rel_tol;
  double abs_tol;
};

double adaptive_recurse(const AdaptiveCtx& ctx, double a, double b,
                        double coarse, int depth) {
  double mid = 0.5 * (a + b);
  double left = panel_integrate(*ctx.f, a, mid, *ctx.high);
  double right = panel_integrate(*ctx.f, mid, b, *ctx.high);
  double fine = left + right;
  double err = std::abs(fine - coarse);
  if (depth <= 0 ||
      err <= ctx.abs_tol + ctx.rel_tol * std::abs(fine))
    return fine;
  return adaptive_recurse(ctx, a, mid, left, depth - 1) +
         adaptive_recurse(ctx, mid, b, right, depth - 1);
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  static std::map<int, GaussRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it == cache.end())
    it = cache.emplace(order, compute_gauss(order)).first;
  return it->second;
}

double gauss_integrate(const std::function<double(double)>& f,
                       double a, double b, int order) {
  return panel_integrate(f, a, b, gauss_legendre(order));
}

double adaptive_integrate(const std::function<double(double)>& f,
                          double a, double b,
                          double rel_tol, double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  double coarse = panel_integrate(f, a, b, gauss_legendre(15));
  // Panels contributing below roundoff relative to the whole integral are
  // accepted outright; without this floor, integrable endpoint
  // singularities subdivide to full depth at every scale.
  const double floor_tol = std::max(abs_tol, 1e-16 * std::abs(coarse));
  AdaptiveCtx ctx{&f, &gauss_legendre(7), &gauss_legendre(15),
                  rel_tol, floor_tol};
  return adaptive_recurse(ctx, a, b, coarse, max_depth);
}

double doubling_integrate(const std::function<double(double)>& f,
                          double a, double b,
                          double rel_tol, int max_panels) {
  const GaussRule& rule = gauss_legendre(8);
  double prev = 0.0;
  for (int panels = 4; panels <= max_panels; panels *= 2) {
    KahanSum acc;
    double abs_scale = 0.0;
    double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
      double v = panel_integrate(f, a + p * h, a + (p + 1) * h, rule);
      acc.add(v);
      abs_scale += std::abs(v);
    }
    double cur = acc.value();
    // The roundoff term keeps integrals that cancel by symmetry from
    // refining forever in search of relative accuracy they cannot have.
    double scale = std::max(std::abs(cur), 1e-14 * abs_scale);
    if (panels > 4 && std::abs(cur - prev) <= rel_tol * std::max(scale, 1e-300))
      return cur;
    prev = cur;
  }
  return prev;
}

namespace {

struct TanhSinhNode {
  double tau;     // tanh((pi/2) sinh t), abscissa on (-1, 1)
  double weight;  // (pi/2) cosh t / cosh^2((pi/2) sinh t)
};

// Node table for one refinement level: level 0 holds the integer abscissae
// t = 0, +-1, ..., deeper levels hold the odd multiples of h = 2^-level so
// refinements reuse every earlier sample.
const std::vector<TanhSinhNode>& tanh_sinh_level(int level) {
  static std::vector<std::vector<TanhSinhNode>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  const double t_max = 4.0;
  for (int l = static_cast<int>(cache.size()); l <= level; ++l) {
    std::vector<TanhSinhNode> nodes;
    double h = std::ldexp(1.0, -l);
    double step = (l == 0) ? h : 2.0 * h;
    double start = (l == 0) ? 0.0 : h;
    for (double t = start; t <= t_max; t += step) {
      double u = 0.5 * kPi * std::sinh(t);
      double c = std::cosh(u);
      TanhSinhNode n{std::tanh(u), 0.5 * kPi * std::cosh(t) / (c * c)};
      nodes.push_back(n);
    }
    cache.push_back(std::move(nodes));
  }
  return cache[level];
}

}  // namespace

double tanh_sinh_integrate(const std::function<double(double)>& f,
                           double a, double b,
                           double rel_tol, int max_level) {
  if (a == b) return 0.0;
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double abs_scale = 0.0;
  auto sample = [&](const TanhSinhNode& n, double sign) {
    double x = mid + sign * half * n.tau;
    if (x <= std::min(a, b) || x >= std::max(a, b)) return 0.0;
    double v = n.weight * f(x);
    if (!std::isfinite(v)) return 0.0;
    abs_scale += std::abs(v);
    return v;
  };
  KahanSum acc;
  acc.add(sample(tanh_sinh_level(0)[0], 1.0));
  for (size_t i = 1; i < tanh_sinh_level(0).size(); ++i) {
    acc.add(sample(tanh_sinh_level(0)[i], 1.0));
    acc.add(sample(tanh_sinh_level(0)[i], -1.0));
  }
  double prev = half * acc.value();
  for (int level = 1; level <= max_level; ++level) {
    for (const TanhSinhNode& n : tanh_sinh_level(level)) {
      acc.add(sample(n, 1.0));
      acc.add(sample(n, -1.0));
    }
    double h = std::ldexp(1.0, -level);
    double cur = h * half * acc.value();
    // As in doubling_integrate, cancellation caps attainable accuracy.
    double scale = std::max(std::abs(cur),
                            1e-14 * h * std::abs(half) * abs_scale);
    if (level > 1 &&
        std::abs(cur - prev) <= rel_tol * std::max(scale, 1e-300))
      return cur;
    prev = cur;
  }
  return prev;
}

double beta_function(double a, double b) {
  return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

double unit_sphere_area(int dim) {
  return 2.0 * std::pow(kPi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

SmallMatrix SmallMatrix::identity(int size) {
  SmallMatrix m(size);
  for (int i = 0; i < size; ++i) m(i, i) = 1.0;
  return m;
}

SmallMatrix mat_mul(const SmallMatrix& x, const SmallMatrix& y) {
  SmallMatrix out(x.n);
  for (int i = 0; i < x.n; ++i)
    for (int k = 0; k < x.n; ++k) {
      double xv = x(i, k);
      if (xv == 0.0) continue;
      for (int j = 0; j < x.n; ++j) out(i, j) += xv * y(k, j);
    }
  return out;
}

std::vector<double> mat_vec(const SmallMatrix& x, const std::vector<double>& v) {
  std::vector<double> out(x.n, 0.0);
  for (int i = 0; i < x.n; ++i) {
    KahanSum acc;
    for (int j = 0; j < x.n; ++j) acc.add(x(i, j) * v[j]);
    out[i] = acc.value();
  }
  return out;
}

SmallMatrix mat_exp(const SmallMatrix& x) {
  // Scale down until the norm is small, run a Taylor series, square back.
  double norm = 0.0;
  for (int i = 0; i < x.n; ++i) {
    double row = 0.0;
    for (int j = 0; j < x.n; ++j) row += std::abs(x(i, j));
    norm = std::max(norm, row);
  }
  int squarings = 0;
  double scale = 1.0;
  while (norm * scale > 0.5) {
    scale *= 0.5;
    ++squarings;
  }
  SmallMatrix scaled(x.n);
  for (size_t i = 0; i < x.a.size(); ++i) scaled.a[i] = x.a[i] * scale;

  SmallMatrix result = SmallMatrix::identity(x.n);
  SmallMatrix term = SmallMatrix::identity(x.n);
  for (int k = 1; k <= 24; ++k) {
    term = mat_mul(term, scaled);
    for (size_t i = 0; i < term.a.size(); ++i) term.a[i] /= k;
    double tn = 0.0;
    for (double v : term.a) tn += std::abs(v);
    for (size_t i = 0; i < term.a.size(); ++i) result.a[i] += term.a[i];
    if (tn < 1e-18) break;
  }
  for (int k = 0; k < squarings; ++k) result = mat_mul(result, result);
  return result;
}

std::vector<double> solve_linear(SmallMatrix x, std::vector<double> b) {
  int n = x.n;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(x(r, col)) > std::abs(x(pivot, col))) pivot = r;
    if (std::abs(x(pivot, col)) < 1e-300)
      throw std::runtime_error("solve_linear: singular matrix");
    if (pivot != col) {
      for (int j = 0; j < n; ++j) std::swap(x(pivot, j), x(col, j));
      std::swap(b[pivot], b[col]);
    }
    for (int r = col + 1; r < n; ++r) {
      double m = x(r, col) / x(col, col);
      if (m == 0.0) continue;
      for (int j = col; j < n; ++j) x(r, j) -= m * x(col, j);
      b[r] -= m * b[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int j = r + 1; j < n; ++j) s -= x(r, j) * b[j];
    b[r] = s / x(r, r);
  }
  return b;
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u, v, q;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    q = u * u + v * v;
  } while (q >= 1.0 || q == 0.0);
  double factor = std::sqrt(-2.0 * std::log(q) / q);
  spare_ = v * factor;
  have_spare_ = true;
  return u * factor;
}

}  // namespace swarmlab
