#include <cmath>
#include <stdexcept>

#include "swarmlab/asymptotic.hpp"

namespace swarmlab {

namespace {

struct EllipseShape {
  double a1 = 1.0;
  double a2 = 1.0;
};

EllipseShape shape_of(const MinimizerProfile& prof) {
  EllipseShape s;
  if (prof.variant == ProfileVariant::ellipsoid_2d) {
    s.a1 = prof.semi_axes[0];
    s.a2 = prof.semi_axes[1];
  } else {
    s.a1 = prof.radius;
    s.a2 = prof.radius;
  }
  return s;
}

// q(x) = (x1/a1)^2 + (x2/a2)^2 in coordinates relative to the moving center.
double q_of(const EllipseShape& s, double x, double y) {
  return (x / s.a1) * (x / s.a1) + (y / s.a2) * (y / s.a2);
}

// Tangential family Theta_k = (1-q)_+ q^(k-1) J grad q: divergence-free
// against any density of the form rho(q), supported in the ellipse.
void theta_field(const EllipseShape& s, int mode, double x, double y,
                 double* out) {
  double q = q_of(s, x, y);
  if (q >= 1.0) {
    out[0] = 0.0;
    out[1] = 0.0;
    return;
  }
  double amp = (1.0 - q);
  for (int k = 1; k < mode; ++k) amp *= q;
  out[0] = amp * (-2.0 * y / (s.a2 * s.a2));
  out[1] = amp * (2.0 * x / (s.a1 * s.a1));
}

// Scalar continuity tests phi; the report uses grad phi only.
void grad_phi(int mode, double x, double y, double* out) {
  switch (mode) {
    case 1:
      out[0] = 1.0;
      out[1] = 0.0;
      return;
    case 2:
      out[0] = 0.0;
      out[1] = 1.0;
      return;
    case 3:
      out[0] = x;
      out[1] = -y;
      return;
    case 4:
      out[0] = y;
      out[1] = x;
      return;
    default: {
      // Smooth localized bump: phi = exp(-(x^2+y^2)/2).
      double e = std::exp(-0.5 * (x * x + y * y));
      out[0] = -x * e;
      out[1] = -y * e;
      return;
    }
  }
}

}  // namespace

std::vector<WeakTestField> default_test_fields() {
  std::vector<WeakTestField> tests;
  for (int m = 1; m <= 5; ++m)
    tests.push_back({"continuity_phi" + std::to_string(m), false, m});
  for (int m = 1; m <= 3; ++m)
    tests.push_back({"momentum_theta" + std::to_string(m), true, m});
  return tests;
}

WeakResidualReport weak_residuals(const std::vector<CoarseFields>& series,
                                  const LimitTrajectory& traj,
                                  const std::vector<WeakTestField>& tests) {
  if (series.empty())
    throw std::invalid_argument("weak_residuals: empty snapshot series");
  WeakResidualReport report;
  EllipseShape shape = shape_of(traj.profile);

  // <j, Theta(. - X(t))> per vector test and snapshot, for the rate rows.
  std::vector<std::vector<double>> pairings(tests.size());

  for (size_t snap = 0; snap < series.size(); ++snap) {
    const CoarseFields& cf = series[snap];
    const BoxGrid& g = cf.density.grid;
    Point X, V;
    traj.state_at(cf.time, X, V);

    double mass = cf.density.integral();
    double vmag = std::sqrt(norm_sq(V, 2));

    for (size_t ti = 0; ti < tests.size(); ++ti) {
      const WeakTestField& test = tests[ti];
      if (test.vector_test) {
        KahanSum acc;
        for (int j = 0; j < g.ny; ++j)
          for (int i = 0; i < g.nx; ++i) {
            double th[2];
            theta_field(shape, test.mode, g.center_x(i) - X[0],
                        g.center_y(j) - X[1], th);
            acc.add(cf.flux[0].at(i, j) * th[0] +
                    cf.flux[1].at(i, j) * th[1]);
          }
        pairings[ti].push_back(acc.value() * g.cell_area());
      } else {
        KahanSum acc;
        double grad_sup = 0.0;
        for (int j = 0; j < g.ny; ++j)
          for (int i = 0; i < g.nx; ++i) {
            double gp[2];
            grad_phi(test.mode, g.center_x(i) - X[0], g.center_y(j) - X[1],
                     gp);
            double rho = cf.density.at(i, j);
            double rx = cf.flux[0].at(i, j) - rho * V[0];
            double ry = cf.flux[1].at(i, j) - rho * V[1];
            acc.add(rx * gp[0] + ry * gp[1]);
            grad_sup = std::max(grad_sup,
                                std::sqrt(gp[0] * gp[0] + gp[1] * gp[1]));
          }
        double norm = mass * (1.0 + vmag) * std::max(grad_sup, 1e-12);
        double res = std::abs(acc.value() * g.cell_area()) / norm;
        report.rows.push_back({cf.time, test.id, res});
        report.max_continuity_residual =
            std::max(report.max_continuity_residual, res);
      }
    }
  }

  for (size_t ti = 0; ti < tests.size(); ++ti) {
    if (!tests[ti].vector_test) continue;
    const std::vector<double>& M = pairings[ti];
    for (size_t k = 0; k + 1 < M.size(); ++k) {
      double h = series[k + 1].time - series[k].time;
      if (!(h > 0.0)) continue;
      double mass = series[k].density.integral();
      Point X, V;
      traj.state_at(series[k].time, X, V);
      double norm = mass * (1.0 + std::sqrt(norm_sq(V, 2)));
      double rate = std::abs(M[k + 1] - M[k]) / h / norm;
      report.rows.push_back(
          {0.5 * (series[k].time + series[k + 1].time), tests[ti].id, rate});
      report.max_momentum_rate = std::max(report.max_momentum_rate, rate);
    }
  }
  return report;
}

}  // namespace swarmlab
