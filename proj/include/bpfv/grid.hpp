#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bpfv/errors.hpp"

namespace bpfv {

/// Cell averages u_i at one time level.
using StateVector = std::vector<double>;

/// Smallest mesh that still fits the five-cell WENO stencil.
inline constexpr std::size_t kMinCells = 5;

/// Uniform periodic 1D mesh. Interface k sits at x_{k+1/2}, the right face of
/// cell k; the left face of cell 0 is interface n_cells-1.
struct Grid1D {
  std::size_t n_cells = 0;
  double x_left = 0.0;
  double x_right = 0.0;
  double dx = 0.0;
  std::vector<double> cell_centers;

  std::size_t size() const { return n_cells; }
  double length() const { return x_right - x_left; }

  /// Periodic index wrap for offsets within one period.
  std::size_t wrap(std::ptrdiff_t i) const {
    const auto n = static_cast<std::ptrdiff_t>(n_cells);
    i %= n;
    return static_cast<std::size_t>(i < 0 ? i + n : i);
  }
  std::size_t left(std::size_t i) const { return i == 0 ? n_cells - 1 : i - 1; }
  std::size_t right(std::size_t i) const { return i + 1 == n_cells ? 0 : i + 1; }

  double face(std::size_t k) const { return x_left + static_cast<double>(k + 1) * dx; }
};

inline Grid1D make_grid(std::size_t n_cells, std::pair<double, double> domain) {
  if (n_cells < kMinCells) {
    throw ConfigError("mesh needs at least " + std::to_string(kMinCells) +
                      " cells for the WENO5 stencil, got " + std::to_string(n_cells));
  }
  if (!(domain.first < domain.second)) {
    throw ConfigError("degenerate domain: x_left must be < x_right");
  }
  Grid1D g;
  g.n_cells = n_cells;
  g.x_left = domain.first;
  g.x_right = domain.second;
  g.dx = (domain.second - domain.first) / static_cast<double>(n_cells);
  g.cell_centers.resize(n_cells);
  for (std::size_t i = 0; i < n_cells; ++i) {
    g.cell_centers[i] = g.x_left + (static_cast<double>(i) + 0.5) * g.dx;
  }
  return g;
}

/// du_i = -(H_{i+1/2} - H_{i-1/2}) / dx for a periodic array of interface fluxes.
inline void flux_divergence(std::span<const double> fluxes, double dx, std::span<double> out) {
  const std::size_t n = fluxes.size();
  double prev = fluxes[n - 1];
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = -(fluxes[i] - prev) / dx;
    prev = fluxes[i];
  }
}

/// u_i - scale * (G_{i+1/2} - G_{i-1/2}); the conservative update every stepper shares.
inline StateVector conservative_update(std::span<const double> u, std::span<const double> fluxes,
                                       double scale) {
  const std::size_t n = u.size();
  StateVector out(n);
  double prev = fluxes[n - 1];
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = u[i] - scale * (fluxes[i] - prev);
    prev = fluxes[i];
  }
  return out;
}

}  // namespace bpfv
