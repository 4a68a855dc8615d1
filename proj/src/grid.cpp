#include "swarmlab/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace swarmlab {

bool BoxGrid::contains(double x, double y) const {
  return x >= origin[0] && x <= origin[0] + extent_x() && y >= origin[1] &&
         y <= origin[1] + extent_y();
}

BoxGrid make_centered_grid(const std::array<double, 2>& center,
                           double half_extent, int cells_per_side) {
  if (cells_per_side < 2 || half_extent <= 0.0)
    throw std::invalid_argument("make_centered_grid: degenerate grid");
  BoxGrid g;
  g.nx = cells_per_side;
  g.ny = cells_per_side;
  g.spacing = 2.0 * half_extent / cells_per_side;
  g.origin = {center[0] - half_extent, center[1] - half_extent};
  return g;
}

GridField make_field(const BoxGrid& grid) {
  GridField f;
  f.grid = grid;
  f.values.assign(static_cast<size_t>(grid.cells()), 0.0);
  return f;
}

double GridField::integral() const {
  KahanSum sum;
  for (double v : values) sum.add(v);
  return sum.value() * grid.cell_area();
}

std::array<double, 2> GridField::first_moment() const {
  KahanSum mx, my;
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      double v = at(i, j);
      mx.add(v * grid.center_x(i));
      my.add(v * grid.center_y(j));
    }
  return {mx.value() * grid.cell_area(), my.value() * grid.cell_area()};
}

double GridField::second_moment_axis(int axis, double c) const {
  KahanSum sum;
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      double q = (axis == 0 ? grid.center_x(i) : grid.center_y(j)) - c;
      sum.add(at(i, j) * q * q);
    }
  return sum.value() * grid.cell_area();
}

std::vector<FrequencyNode> radial_log_frequencies(double xi_min, double xi_max,
                                                  int n_radial,
                                                  int n_angular) {
  if (!(xi_min > 0.0) || !(xi_max > xi_min) || n_radial < 2 || n_angular < 4)
    throw std::invalid_argument("radial_log_frequencies: bad window");
  std::vector<FrequencyNode> nodes;
  nodes.reserve(static_cast<size_t>(n_radial) * n_angular);
  const double du = std::log(xi_max / xi_min) / (n_radial - 1);
  const double dtheta = 2.0 * kPi / n_angular;
  for (int r = 0; r < n_radial; ++r) {
    double xi = xi_min * std::exp(r * du);
    // Trapezoid in u = ln xi; polar Jacobian xi dxi dtheta = xi^2 du dtheta.
    double wu = (r == 0 || r == n_radial - 1) ? 0.5 * du : du;
    double w = wu * dtheta * xi * xi;
    for (int a = 0; a < n_angular; ++a) {
      double th = (a + 0.5) * dtheta;
      nodes.push_back({xi * std::cos(th), xi * std::sin(th), w});
    }
  }
  return nodes;
}

std::vector<std::complex<double>> fourier_at(
    const GridField& mu, const std::vector<FrequencyNode>& freqs) {
  const BoxGrid& g = mu.grid;
  std::vector<std::complex<double>> out(freqs.size());
  std::vector<std::complex<double>> row_phase(static_cast<size_t>(g.nx));
  std::vector<std::complex<double>> col_phase(static_cast<size_t>(g.ny));
  const double area = g.cell_area();
  for (size_t f = 0; f < freqs.size(); ++f) {
    const double xi1 = freqs[f].xi1;
    const double xi2 = freqs[f].xi2;
    for (int i = 0; i < g.nx; ++i) {
      double ph = -xi1 * g.center_x(i);
      row_phase[static_cast<size_t>(i)] = {std::cos(ph), std::sin(ph)};
    }
    for (int j = 0; j < g.ny; ++j) {
      double ph = -xi2 * g.center_y(j);
      col_phase[static_cast<size_t>(j)] = {std::cos(ph), std::sin(ph)};
    }
    std::complex<double> acc(0.0, 0.0);
    for (int j = 0; j < g.ny; ++j) {
      // Real and imaginary row sums, accumulated separately so the inner
      // loop is plain multiply-add.
      double sr = 0.0, si = 0.0;
      const double* rowv = mu.values.data() + static_cast<size_t>(j) * g.nx;
      for (int i = 0; i < g.nx; ++i) {
        const std::complex<double>& p = row_phase[static_cast<size_t>(i)];
        sr += rowv[i] * p.real();
        si += rowv[i] * p.imag();
      }
      acc += col_phase[static_cast<size_t>(j)] * std::complex<double>(sr, si);
    }
    out[f] = acc * area;
  }
  return out;
}

}  // namespace swarmlab
