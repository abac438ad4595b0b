#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "bpfv/errors.hpp"
#include "bpfv/faces.hpp"
#include "bpfv/grid.hpp"
#include "bpfv/problem.hpp"
#include "bpfv/reconstruction.hpp"

namespace bpfv {

enum class LimiterKind { None, GMC, LMC, FCT, LocalFCT };
enum class BoundsMode { GlobalInitialData, LocalStencil };

struct LimiterConfig {
  LimiterKind kind = LimiterKind::None;
  double gamma = 0.0;  // ignored by the FCT kinds
  BoundsMode bounds_mode = BoundsMode::GlobalInitialData;

  bool operator==(const LimiterConfig&) const = default;
};

/// Per-cell flux-sum bounds Q_i^- <= sum of limited fluxes into cell i <= Q_i^+.
struct BoundsPair {
  std::vector<double> qminus;
  std::vector<double> qplus;
};

/// One correction factor per interface.
struct CorrectionFactors {
  std::vector<double> alpha;
};

inline std::string to_string(LimiterKind k) {
  switch (k) {
    case LimiterKind::None: return "none";
    case LimiterKind::GMC: return "gmc";
    case LimiterKind::LMC: return "lmc";
    case LimiterKind::FCT: return "fct";
    case LimiterKind::LocalFCT: return "local-fct";
  }
  return "?";
}

inline std::string to_string(BoundsMode m) {
  return m == BoundsMode::GlobalInitialData ? "global" : "local";
}

inline BoundsMode bounds_mode_from_string(const std::string& s) {
  if (s == "global") return BoundsMode::GlobalInitialData;
  if (s == "local") return BoundsMode::LocalStencil;
  throw ConfigError("unknown bounds mode '" + s + "' (expected global|local)");
}

/// Admissible range per cell: global bounds of the initial data, or min/max over
/// the 1D vertex neighborhood {i-1, i, i+1}.
inline CellBounds cell_bounds(std::span<const double> u, BoundsMode mode, const ProblemSpec& problem) {
  const std::size_t n = u.size();
  CellBounds b;
  if (mode == BoundsMode::GlobalInitialData) {
    b.lower.assign(n, problem.global_umin);
    b.upper.assign(n, problem.global_umax);
    return b;
  }
  b.lower.resize(n);
  b.upper.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double l = u[i == 0 ? n - 1 : i - 1], c = u[i], r = u[i + 1 == n ? 0 : i + 1];
    b.lower[i] = std::min({l, c, r});
    b.upper[i] = std::max({l, c, r});
  }
  return b;
}

/// GMC bounds from the aggregated bar state ubar_i = sum(lambda ubar_face) / d_i:
/// Q_i^pm = d_i [(u_i^{max/min} - ubar_i) + gamma (u_i^{max/min} - u_i)].
inline BoundsPair gmc_bounds(std::span<const double> u, std::span<const double> ubar,
                             std::span<const double> d, const CellBounds& bounds, double gamma) {
  const std::size_t n = u.size();
  BoundsPair q;
  q.qminus.resize(n);
  q.qplus.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    q.qplus[i] = d[i] * ((bounds.upper[i] - ubar[i]) + gamma * (bounds.upper[i] - u[i]));
    q.qminus[i] = d[i] * ((bounds.lower[i] - ubar[i]) + gamma * (bounds.lower[i] - u[i]));
  }
  return q;
}

/// Aggregated low-order bar states ubar_i^L of every cell.
inline std::vector<double> aggregate_bar_states(const FaceData& faces, std::span<const double> d) {
  const std::size_t n = faces.size();
  std::vector<double> ubar(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t l = i == 0 ? n - 1 : i - 1;
    ubar[i] = (faces.lambda[i] * faces.bar_low[i] + faces.lambda[l] * faces.bar_low[l]) / d[i];
  }
  return ubar;
}

inline BoundsPair gmc_bounds(const FaceData& faces, std::span<const double> u, const CellBounds& bounds,
                             double gamma) {
  const auto d = lambda_sums(faces);
  const auto ubar = aggregate_bar_states(faces, d);
  return gmc_bounds(u, ubar, d, bounds, gamma);
}

/// Relative guard below which a flux sum P counts as zero.
inline double zero_sum_threshold(double q) { return 1e-14 * (1.0 + std::abs(q)); }

/// Zalesak-type correction factors for 1D interface fluxes (cell k receives
/// +F[k] and -F[k-1]). alpha_k = 1 where F_k = 0.
inline CorrectionFactors zalesak_factors(std::span<const double> antidiff, const BoundsPair& q) {
  const std::size_t n = antidiff.size();
  std::vector<double> rplus(n), rminus(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double fr = antidiff[i];
    const double fl = antidiff[i == 0 ? n - 1 : i - 1];
    const double pplus = std::max(0.0, fr) + std::max(0.0, -fl);
    const double pminus = std::min(0.0, fr) + std::min(0.0, -fl);
    rplus[i] = pplus <= zero_sum_threshold(q.qplus[i]) ? 1.0 : std::clamp(q.qplus[i] / pplus, 0.0, 1.0);
    rminus[i] =
        -pminus <= zero_sum_threshold(q.qminus[i]) ? 1.0 : std::clamp(q.qminus[i] / pminus, 0.0, 1.0);
  }
  CorrectionFactors cf;
  cf.alpha.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = k + 1 == n ? 0 : k + 1;
    const double f = antidiff[k];
    if (f > 0.0) {
      cf.alpha[k] = std::min(rplus[k], rminus[j]);
    } else if (f < 0.0) {
      cf.alpha[k] = std::min(rminus[k], rplus[j]);
    } else {
      cf.alpha[k] = 1.0;
    }
  }
  return cf;
}

/// Facewise bounds split from the per-cell bounds: for the face k seen from cell
/// `from`, Q^pm = scale * lambda_k [(u^{max/min} - ubar_k) + gamma (u^{max/min} - u_from)].
struct FacewiseBounds {
  // [k] seen from the left cell k, and from the right cell k+1.
  std::vector<double> left_minus, left_plus, right_minus, right_plus;
};

inline FacewiseBounds lmc_face_bounds(std::span<const double> u, const FaceData& faces,
                                      const CellBounds& bounds, double gamma, double scale = 1.0) {
  const std::size_t n = u.size();
  FacewiseBounds fb;
  fb.left_minus.resize(n);
  fb.left_plus.resize(n);
  fb.right_minus.resize(n);
  fb.right_plus.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = k + 1 == n ? 0 : k + 1;
    const double lam = scale * faces.lambda[k];
    const double ub = faces.bar_low[k];
    fb.left_plus[k] = lam * ((bounds.upper[k] - ub) + gamma * (bounds.upper[k] - u[k]));
    fb.left_minus[k] = lam * ((bounds.lower[k] - ub) + gamma * (bounds.lower[k] - u[k]));
    fb.right_plus[k] = lam * ((bounds.upper[j] - ub) + gamma * (bounds.upper[j] - u[j]));
    fb.right_minus[k] = lam * ((bounds.lower[j] - ub) + gamma * (bounds.lower[j] - u[j]));
  }
  return fb;
}

/// Per-interface clipping of F against both adjacent cells' facewise bounds.
/// The result keeps the sign of F and never exceeds it in magnitude.
inline std::vector<double> clip_fluxes(std::span<const double> antidiff, const FacewiseBounds& fb) {
  const std::size_t n = antidiff.size();
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double f = antidiff[k];
    if (f > 0.0) {
      out[k] = std::max(0.0, std::min({fb.left_plus[k], f, -fb.right_minus[k]}));
    } else if (f < 0.0) {
      out[k] = std::min(0.0, std::max({fb.left_minus[k], f, -fb.right_plus[k]}));
    } else {
      out[k] = 0.0;
    }
  }
  return out;
}

/// Local monolithic convex limiting of the antidiffusive fluxes.
inline std::vector<double> lmc_limit(std::span<const double> antidiff, std::span<const double> u,
                                     const FaceData& faces, const CellBounds& bounds, double gamma) {
  return clip_fluxes(antidiff, lmc_face_bounds(u, faces, bounds, gamma));
}

/// Tolerance on the bound-preservation of low-order predictors and limited results.
inline constexpr double kBoundTolerance = 1e-11;

/// FCT bounds (dx/dt)(u^{max/min} - u^FE). In 1D the localized variant assigns
/// |S|/|dK| = 1/2 of the cell bound to each face.
inline BoundsPair fct_bounds(std::span<const double> u_fe, double dt, double dx, const CellBounds& bounds,
                             bool localized) {
  if (!(dt > 0.0)) throw PreconditionError("FCT bounds need dt > 0");
  const std::size_t n = u_fe.size();
  const double scale = (localized ? 0.5 : 1.0) * dx / dt;
  BoundsPair q;
  q.qminus.resize(n);
  q.qplus.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (u_fe[i] < bounds.lower[i] - kBoundTolerance || u_fe[i] > bounds.upper[i] + kBoundTolerance) {
      throw PreconditionError("low-order predictor leaves its bounds at cell " + std::to_string(i));
    }
    q.qplus[i] = std::max(0.0, scale * (bounds.upper[i] - u_fe[i]));
    q.qminus[i] = std::min(0.0, scale * (bounds.lower[i] - u_fe[i]));
  }
  return q;
}

/// Result of a space-time limited update.
struct LimitedUpdate {
  StateVector state;
  std::vector<double> alpha;   // effective correction factor per interface
  std::vector<double> fluxes;  // limited time-integrated flux G* per interface
  bool cfl_ok = true;          // whether the step met the bound-preserving CFL condition
};

/// Largest (1 + gamma) * c * dt * d_i / dx over all cells.
inline double bp_cfl_number(const FaceData& faces, double scaled_dt, double dx, double gamma) {
  double worst = 0.0;
  for (double d : lambda_sums(faces)) worst = std::max(worst, (1.0 + gamma) * scaled_dt * d / dx);
  return worst;
}

namespace detail {

inline void check_bounds(std::span<const double> y, const CellBounds& bounds, const char* what) {
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y[i])) {
      throw NumericalError(std::string(what) + ": non-finite value at cell " + std::to_string(i));
    }
    if (y[i] < bounds.lower[i] - kBoundTolerance || y[i] > bounds.upper[i] + kBoundTolerance) {
      throw NumericalError(std::string(what) + ": limited state violates bounds at cell " +
                           std::to_string(i) + " (value " + std::to_string(y[i]) + ")");
    }
  }
}

}  // namespace detail

/// Correction factors for the limited update
///   y* = y^FE + (dt/dx) sum alpha F,   y^FE = u^n - c (dt/dx) (H^FE diff),
///   F = c H^FE - G,
/// where G = sum_s a_{ms} H^(s) (a stage) or sum_m b_m H^(m) (the final update, c = 1).
/// GMC bounds of u^n are scaled by c; FCT bounds come from y^FE and scale with 1/dt.
inline CorrectionFactors space_time_factors(std::span<const double> u_n, double c, std::span<const double> g,
                                            const FaceData& faces_n, const LimiterConfig& limiter, double dt,
                                            const Grid1D& grid, const CellBounds& bounds) {
  const std::size_t n = u_n.size();
  std::vector<double> raw(n);
  for (std::size_t k = 0; k < n; ++k) raw[k] = c * faces_n.lf_low[k] - g[k];

  CorrectionFactors cf;
  switch (limiter.kind) {
    case LimiterKind::None:
      cf.alpha.assign(n, 1.0);
      return cf;
    case LimiterKind::GMC: {
      auto q = gmc_bounds(faces_n, u_n, bounds, limiter.gamma);
      for (std::size_t i = 0; i < n; ++i) {
        q.qplus[i] = std::max(0.0, c * q.qplus[i]);
        q.qminus[i] = std::min(0.0, c * q.qminus[i]);
      }
      return zalesak_factors(raw, q);
    }
    case LimiterKind::FCT:
    case LimiterKind::LocalFCT: {
      const auto y_fe = conservative_update(u_n, faces_n.lf_low, c * dt / grid.dx);
      const bool local = limiter.kind == LimiterKind::LocalFCT;
      const auto q = fct_bounds(y_fe, dt, grid.dx, bounds, local);
      if (!local) return zalesak_factors(raw, q);
      FacewiseBounds fb;
      fb.left_minus = q.qminus;
      fb.left_plus = q.qplus;
      fb.right_minus.resize(n);
      fb.right_plus.resize(n);
      for (std::size_t k = 0; k < n; ++k) {
        fb.right_minus[k] = q.qminus[k + 1 == n ? 0 : k + 1];
        fb.right_plus[k] = q.qplus[k + 1 == n ? 0 : k + 1];
      }
      const auto clipped = clip_fluxes(raw, fb);
      cf.alpha.resize(n);
      for (std::size_t k = 0; k < n; ++k) cf.alpha[k] = raw[k] == 0.0 ? 1.0 : clipped[k] / raw[k];
      return cf;
    }
    case LimiterKind::LMC: {
      const auto fb = lmc_face_bounds(u_n, faces_n, bounds, limiter.gamma, c);
      const auto clipped = clip_fluxes(raw, fb);
      cf.alpha.resize(n);
      for (std::size_t k = 0; k < n; ++k) cf.alpha[k] = raw[k] == 0.0 ? 1.0 : clipped[k] / raw[k];
      return cf;
    }
  }
  return cf;
}

/// Stagewise space-time limiting of one Butcher stage with abscissa c_m.
inline LimitedUpdate stage_limit(std::span<const double> u_n, double c_m, std::span<const double> g,
                                 const FaceData& faces_n, const LimiterConfig& limiter, double dt,
                                 const Grid1D& grid, const CellBounds& bounds) {
  if (c_m < 0.0) throw PreconditionError("stage limiting needs c_m >= 0");
  const std::size_t n = u_n.size();
  LimitedUpdate out;
  out.alpha = space_time_factors(u_n, c_m, g, faces_n, limiter, dt, grid, bounds).alpha;
  out.fluxes.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double a = out.alpha[k];
    const double low = c_m * faces_n.lf_low[k];
    // Blend form: alpha = 1 reproduces G bitwise, alpha = 0 the low-order flux.
    out.fluxes[k] = a == 1.0 ? g[k] : (a == 0.0 ? low : a * g[k] + (1.0 - a) * low);
  }
  out.state = conservative_update(u_n, out.fluxes, dt / grid.dx);
  const double gamma = (limiter.kind == LimiterKind::GMC || limiter.kind == LimiterKind::LMC) ? limiter.gamma : 0.0;
  out.cfl_ok = bp_cfl_number(faces_n, c_m * dt, grid.dx, gamma) <= 1.0 + 1e-12;
  if (limiter.kind != LimiterKind::None && out.cfl_ok) detail::check_bounds(out.state, bounds, "space-time limiter");
  return out;
}

/// Final-stage limiting of an RK update with time-integrated flux h_rk = sum b_m H^(m):
/// u^{n+1} = u^n - (dt/dx) diff[alpha H^RK + (1 - alpha) H^FE].
inline LimitedUpdate final_stage_limit(std::span<const double> u_n, const FaceData& faces_n,
                                       std::span<const double> h_rk, const LimiterConfig& limiter, double dt,
                                       const Grid1D& grid, const CellBounds& bounds) {
  return stage_limit(u_n, 1.0, h_rk, faces_n, limiter, dt, grid, bounds);
}

}  // namespace bpfv
