#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "bpfv/errors.hpp"
#include "bpfv/grid.hpp"

namespace bpfv {

/// Interface traces per cell: minus = value at x_{i-1/2}, plus = value at x_{i+1/2}.
struct InterfaceValues {
  std::vector<double> minus;
  std::vector<double> plus;
};

enum class Reconstruction { FirstOrder, WENO5, Linear5 };

inline constexpr double kWenoEpsilon = 1e-40;

namespace detail {

// Left-biased WENO5 trace at the right face of the center cell of the stencil
// (a, b, c, d, e) = (u_{i-2}, ..., u_{i+2}). Candidate values are formed as
// corrections to c so that constant data is reproduced exactly.
inline double weno5_trace(double a, double b, double c, double d, double e) {
  const double b0 = 13.0 / 12.0 * (a - 2.0 * b + c) * (a - 2.0 * b + c) +
                    0.25 * (a - 4.0 * b + 3.0 * c) * (a - 4.0 * b + 3.0 * c);
  const double b1 = 13.0 / 12.0 * (b - 2.0 * c + d) * (b - 2.0 * c + d) + 0.25 * (b - d) * (b - d);
  const double b2 = 13.0 / 12.0 * (c - 2.0 * d + e) * (c - 2.0 * d + e) +
                    0.25 * (3.0 * c - 4.0 * d + e) * (3.0 * c - 4.0 * d + e);

  const double a0 = 0.1 / ((kWenoEpsilon + b0) * (kWenoEpsilon + b0));
  const double a1 = 0.6 / ((kWenoEpsilon + b1) * (kWenoEpsilon + b1));
  const double a2 = 0.3 / ((kWenoEpsilon + b2) * (kWenoEpsilon + b2));
  const double sum = a0 + a1 + a2;

  const double q0 = (2.0 * (a - c) - 7.0 * (b - c)) / 6.0;
  const double q1 = (-(b - c) + 2.0 * (d - c)) / 6.0;
  const double q2 = (5.0 * (d - c) - (e - c)) / 6.0;
  return c + (a0 * q0 + a1 * q1 + a2 * q2) / sum;
}

// Right-face value (2a - 13b + 47c + 27d - 3e) / 60 of the quartic through the
// five averages, written as a correction to c. The mirrored stencil gives the
// left face, (-3a + 27b + 47c - 13d + 2e) / 60 in the original order.
inline double linear5_trace(double a, double b, double c, double d, double e) {
  return c + (2.0 * (a - c) - 13.0 * (b - c) + 27.0 * (d - c) - 3.0 * (e - c)) / 60.0;
}

template <class TraceFn>
InterfaceValues reconstruct_with(std::span<const double> u, TraceFn trace) {
  const std::size_t n = u.size();
  if (n < kMinCells) throw PreconditionError("reconstruction needs at least 5 cells");
  InterfaceValues iv;
  iv.minus.resize(n);
  iv.plus.resize(n);
  auto at = [&](std::ptrdiff_t i) {
    const auto m = static_cast<std::ptrdiff_t>(n);
    return u[static_cast<std::size_t>(((i % m) + m) % m)];
  };
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::ptrdiff_t>(i);
    const double um2 = at(k - 2), um1 = at(k - 1), u0 = u[i], up1 = at(k + 1), up2 = at(k + 2);
    iv.plus[i] = trace(um2, um1, u0, up1, up2);
    iv.minus[i] = trace(up2, up1, u0, um1, um2);
  }
  return iv;
}

}  // namespace detail

/// Classical fifth-order WENO (Jiang-Shu indicators, eps = 1e-40, power 2) on a periodic mesh.
inline InterfaceValues weno5_reconstruct(std::span<const double> state) {
  return detail::reconstruct_with(state, detail::weno5_trace);
}

/// Fifth-order linear (central-upwind) reconstruction without nonlinear weights.
inline InterfaceValues linear5_reconstruct(std::span<const double> state) {
  return detail::reconstruct_with(state, detail::linear5_trace);
}

/// Piecewise-constant traces; turns every high-order flux into the low-order one.
inline InterfaceValues first_order_reconstruct(std::span<const double> state) {
  InterfaceValues iv;
  iv.minus.assign(state.begin(), state.end());
  iv.plus.assign(state.begin(), state.end());
  return iv;
}

inline InterfaceValues reconstruct(Reconstruction kind, std::span<const double> state) {
  switch (kind) {
    case Reconstruction::FirstOrder:
      return first_order_reconstruct(state);
    case Reconstruction::WENO5:
      return weno5_reconstruct(state);
    case Reconstruction::Linear5:
      return linear5_reconstruct(state);
  }
  return first_order_reconstruct(state);
}

inline std::string to_string(Reconstruction r) {
  switch (r) {
    case Reconstruction::FirstOrder: return "first-order";
    case Reconstruction::WENO5: return "weno5";
    case Reconstruction::Linear5: return "linear5";
  }
  return "?";
}

inline Reconstruction reconstruction_from_string(const std::string& s) {
  if (s == "weno5") return Reconstruction::WENO5;
  if (s == "linear5") return Reconstruction::Linear5;
  if (s == "first-order") return Reconstruction::FirstOrder;
  throw ConfigError("unknown reconstruction '" + s + "' (expected weno5|linear5)");
}

/// Admissible interval [lower_i, upper_i] per cell.
struct CellBounds {
  std::vector<double> lower;
  std::vector<double> upper;
};

/// Which bounded value the slope limiter blends the traces toward.
enum class SlopeLimitAnchor { StageAverage, PreviousStep };

/// Tolerance within which an anchor counts as admissible.
inline constexpr double kAnchorTolerance = 1e-12;

/// Barth-Jespersen style blending of both traces of cell i toward its anchor:
/// trace* = anchor + theta_i (trace - anchor), theta_i in [0, 1] chosen so that
/// every limited trace lies in [lower_i, upper_i].
inline InterfaceValues slope_limit_bp(const InterfaceValues& iv, std::span<const double> anchors,
                                      const CellBounds& bounds, std::vector<double>* theta_out = nullptr) {
  const std::size_t n = anchors.size();
  InterfaceValues out;
  out.minus.resize(n);
  out.plus.resize(n);
  if (theta_out) theta_out->assign(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = bounds.lower[i];
    const double hi = bounds.upper[i];
    double y = anchors[i];
    if (y < lo - kAnchorTolerance || y > hi + kAnchorTolerance) {
      throw PreconditionError("slope limiter anchor outside its bounds at cell " + std::to_string(i));
    }
    y = std::clamp(y, lo, hi);
    double theta = 1.0;
    for (double trace : {iv.minus[i], iv.plus[i]}) {
      const double dev = trace - y;
      if (trace > hi && dev > 0.0) {
        theta = std::min(theta, (hi - y) / dev);
      } else if (trace < lo && dev < 0.0) {
        theta = std::min(theta, (lo - y) / dev);
      }
    }
    theta = std::clamp(theta, 0.0, 1.0);
    if (theta_out) (*theta_out)[i] = theta;
    if (theta == 1.0) {
      out.minus[i] = iv.minus[i];
      out.plus[i] = iv.plus[i];
    } else {
      out.minus[i] = std::clamp(y + theta * (iv.minus[i] - y), lo, hi);
      out.plus[i] = std::clamp(y + theta * (iv.plus[i] - y), lo, hi);
    }
  }
  return out;
}

}  // namespace bpfv
