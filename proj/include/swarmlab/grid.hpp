// Cell-centered box grids in 2-D, scalar fields on them, and the truncated
// Fourier transform used by the negative-Sobolev machinery.
#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "swarmlab/numerics.hpp"

namespace swarmlab {

struct BoxGrid {
  std::array<double, 2> origin{0.0, 0.0};  // lower-left corner
  double spacing = 0.1;                    // square cells
  int nx = 0;
  int ny = 0;

  int cells() const { return nx * ny; }
  double cell_area() const { return spacing * spacing; }
  double center_x(int i) const { return origin[0] + (i + 0.5) * spacing; }
  double center_y(int j) const { return origin[1] + (j + 0.5) * spacing; }
  double extent_x() const { return nx * spacing; }
  double extent_y() const { return ny * spacing; }
  bool contains(double x, double y) const;
};

// Square grid centered at `center` covering radius `half_extent` on each side.
BoxGrid make_centered_grid(const std::array<double, 2>& center,
                           double half_extent, int cells_per_side);

struct GridField {
  BoxGrid grid;
  std::vector<double> values;  // row-major, index j * nx + i

  double& at(int i, int j) { return values[static_cast<size_t>(j) * grid.nx + i]; }
  double at(int i, int j) const {
    return values[static_cast<size_t>(j) * grid.nx + i];
  }
  double integral() const;                    // cell_area * sum
  std::array<double, 2> first_moment() const; // integral of x * field
  // Integral of (x_j - c_j)^2 * field along axis j.
  double second_moment_axis(int j, double c) const;
};

GridField make_field(const BoxGrid& grid);

// Samples an analytic density onto cell centers (midpoint rule).
template <typename F>
GridField sample_field(const BoxGrid& grid, F&& density) {
  GridField f = make_field(grid);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i)
      f.at(i, j) = density(grid.center_x(i), grid.center_y(j));
  return f;
}

// Truncated Fourier transform of a field at an arbitrary frequency list,
// convention mu_hat(xi) = integral of e^{-i x.xi} mu(x) dx, midpoint rule.
// Separable row/column phase factors keep the cost at O(freqs * cells)
// multiply-adds with only O(freqs * (nx + ny)) trig calls.
struct FrequencyNode {
  double xi1 = 0.0;
  double xi2 = 0.0;
  double weight = 0.0;  // quadrature weight in the xi-plane
};

// Radial-logarithmic grid: n_radial log-spaced magnitudes in
// [xi_min, xi_max], n_angular equispaced directions, trapezoidal-in-log
// radial weights times the polar Jacobian.
std::vector<FrequencyNode> radial_log_frequencies(double xi_min, double xi_max,
                                                  int n_radial, int n_angular);

std::vector<std::complex<double>> fourier_at(const GridField& mu,
                                             const std::vector<FrequencyNode>& freqs);

}  // namespace swarmlab
