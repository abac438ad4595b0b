#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "bpfv/errors.hpp"
#include "bpfv/grid.hpp"
#include "bpfv/problem.hpp"

namespace bpfv {

/// Fifth-order point value at each cell center from periodic cell averages,
/// (9u_{i-2} - 116u_{i-1} + 2134u_i - 116u_{i+1} + 9u_{i+2}) / 1920.
inline std::vector<double> point_reconstruct(std::span<const double> u) {
  const std::size_t n = u.size();
  if (n < kMinCells) throw PreconditionError("point reconstruction needs at least 5 cells");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double um2 = u[(i + n - 2) % n], um1 = u[(i + n - 1) % n];
    const double up1 = u[(i + 1) % n], up2 = u[(i + 2) % n];
    const double c = u[i];
    out[i] = c + (9.0 * (um2 - c) - 116.0 * (um1 - c) - 116.0 * (up1 - c) + 9.0 * (up2 - c)) / 1920.0;
  }
  return out;
}

/// Discrete L1 distance dx * sum |values_i - reference_i|.
inline double l1_distance(std::span<const double> values, std::span<const double> reference, double dx) {
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += std::abs(values[i] - reference[i]);
  return dx * s;
}

/// E1 = dx * sum |u~_i - u_exact(x_i)| with u~ the point reconstruction.
inline double l1_error(std::span<const double> u, const Grid1D& grid, const std::function<double(double)>& exact) {
  const auto pts = point_reconstruct(u);
  std::vector<double> ref(grid.n_cells);
  for (std::size_t i = 0; i < grid.n_cells; ++i) ref[i] = exact(grid.cell_centers[i]);
  return l1_distance(pts, ref, grid.dx);
}

inline double l1_error(std::span<const double> u, const ProblemSpec& problem, const Grid1D& grid, double t) {
  return l1_error(u, grid, [&](double x) { return exact_solution(problem, x, t); });
}

/// Sentinel for an undefined convergence rate (a zero or non-finite error).
inline constexpr double kUndefinedEoc = std::numeric_limits<double>::quiet_NaN();

/// EOC_k = log(E_{k-1}/E_k) / log(N_k/N_{k-1}) for k = 1..size-1.
inline std::vector<double> eoc(std::span<const double> errors, std::span<const double> n_values) {
  if (errors.size() != n_values.size()) throw PreconditionError("eoc: errors and mesh sizes differ in length");
  std::vector<double> out;
  for (std::size_t k = 1; k < errors.size(); ++k) {
    if (!(n_values[k] > n_values[k - 1])) throw PreconditionError("eoc: mesh sizes must increase strictly");
    const double e0 = errors[k - 1], e1 = errors[k];
    if (!(e0 > 0.0) || !(e1 > 0.0) || !std::isfinite(e0) || !std::isfinite(e1)) {
      out.push_back(kUndefinedEoc);
    } else {
      out.push_back(std::log(e0 / e1) / std::log(n_values[k] / n_values[k - 1]));
    }
  }
  return out;
}

struct BoundViolation {
  double delta_minus = std::numeric_limits<double>::infinity();
  double delta_plus = std::numeric_limits<double>::infinity();
  double delta() const { return std::min(delta_minus, delta_plus); }
};

/// Running min over time and cells of (u - umin) and (umax - u).
class BoundViolationTracker {
 public:
  BoundViolationTracker(double umin, double umax) : umin_(umin), umax_(umax) {}

  void observe(std::span<const double> u) {
    for (double v : u) {
      result_.delta_minus = std::min(result_.delta_minus, v - umin_);
      result_.delta_plus = std::min(result_.delta_plus, umax_ - v);
    }
  }
  const BoundViolation& result() const { return result_; }

 private:
  double umin_, umax_;
  BoundViolation result_;
};

inline BoundViolation bound_violation(std::span<const std::vector<double>> history, double umin, double umax) {
  if (history.empty()) throw PreconditionError("bound_violation needs a nonempty history");
  BoundViolationTracker t(umin, umax);
  for (const auto& s : history) t.observe(s);
  return t.result();
}

inline double total_mass(std::span<const double> u, double dx) {
  double s = 0.0;
  for (double v : u) s += v;
  return dx * s;
}

}  // namespace bpfv
