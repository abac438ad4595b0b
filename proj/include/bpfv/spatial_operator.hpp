#pragma once

#include <span>
#include <vector>

#include "bpfv/errors.hpp"
#include "bpfv/faces.hpp"
#include "bpfv/grid.hpp"
#include "bpfv/limiters.hpp"
#include "bpfv/problem.hpp"
#include "bpfv/reconstruction.hpp"

namespace bpfv {

/// H*_k = alpha_k H^high_k + (1 - alpha_k) H^low_k, i.e. H^low - alpha F.
inline std::vector<double> blended_fluxes(const FaceData& faces, std::span<const double> alpha) {
  const std::size_t n = faces.size();
  std::vector<double> h(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double a = alpha[k];
    h[k] = a == 1.0 ? faces.lf_high[k]
                    : (a == 0.0 ? faces.lf_low[k] : a * faces.lf_high[k] + (1.0 - a) * faces.lf_low[k]);
  }
  return h;
}

/// Interface fluxes of the flux-corrected semi-discretization. Only limiters with
/// a semi-discrete meaning (None, GMC, LMC) are accepted here.
inline std::vector<double> limited_fluxes(const FaceData& faces, std::span<const double> u,
                                          const LimiterConfig& limiter, const CellBounds& bounds) {
  switch (limiter.kind) {
    case LimiterKind::None:
      return faces.lf_high;
    case LimiterKind::GMC: {
      const auto cf = zalesak_factors(faces.antidiff, gmc_bounds(faces, u, bounds, limiter.gamma));
      return blended_fluxes(faces, cf.alpha);
    }
    case LimiterKind::LMC: {
      const auto fstar = lmc_limit(faces.antidiff, u, faces, bounds, limiter.gamma);
      std::vector<double> h(faces.size());
      for (std::size_t k = 0; k < h.size(); ++k) {
        h[k] = fstar[k] == faces.antidiff[k] ? faces.lf_high[k] : faces.lf_low[k] - fstar[k];
      }
      return h;
    }
    case LimiterKind::FCT:
    case LimiterKind::LocalFCT:
      break;
  }
  throw ConfigError("FCT limiters depend on dt and have no semi-discrete form; use them for final-stage limiting");
}

/// d_i (ubar*_i - u_i) / dx in flux-difference form.
inline std::vector<double> limited_rhs(const FaceData& faces, std::span<const double> u,
                                       const LimiterConfig& limiter, const Grid1D& grid,
                                       const CellBounds& bounds) {
  std::vector<double> rhs(u.size());
  flux_divergence(limited_fluxes(faces, u, limiter, bounds), grid.dx, rhs);
  return rhs;
}

/// Same operator in bar-state form for prescribed factors:
/// ubar*_i = ubar^L_i + (alpha_{i+1/2} F_{i+1/2} - alpha_{i-1/2} F_{i-1/2}) / d_i.
inline std::vector<double> limited_rhs_bar_form(const FaceData& faces, std::span<const double> u,
                                                std::span<const double> alpha, const Grid1D& grid) {
  const std::size_t n = u.size();
  const auto d = lambda_sums(faces);
  const auto ubar = aggregate_bar_states(faces, d);
  std::vector<double> rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t l = i == 0 ? n - 1 : i - 1;
    const double ustar = ubar[i] + (alpha[i] * faces.antidiff[i] - alpha[l] * faces.antidiff[l]) / d[i];
    rhs[i] = d[i] * (ustar - u[i]) / grid.dx;
  }
  return rhs;
}

struct SlopeLimitConfig {
  bool enabled = false;
  SlopeLimitAnchor anchor = SlopeLimitAnchor::StageAverage;

  bool operator==(const SlopeLimitConfig&) const = default;
};

/// The method-of-lines right-hand side: reconstruction, optional slope limiting,
/// LF fluxes with a shared lambda per interface, and spatial flux limiting.
class SemiDiscreteOperator {
 public:
  SemiDiscreteOperator(Grid1D grid, ProblemSpec problem, Reconstruction recon, LimiterConfig limiter,
                       SlopeLimitConfig slope = {})
      : grid_(std::move(grid)),
        problem_(std::move(problem)),
        recon_(recon),
        limiter_(limiter),
        slope_(slope) {
    if (limiter_.kind == LimiterKind::FCT || limiter_.kind == LimiterKind::LocalFCT) {
      throw ConfigError("FCT limiters have no semi-discrete counterpart");
    }
  }

  const Grid1D& grid() const { return grid_; }
  const ProblemSpec& problem() const { return problem_; }
  const LimiterConfig& limiter() const { return limiter_; }
  Reconstruction reconstruction() const { return recon_; }

  CellBounds bounds(std::span<const double> y) const { return cell_bounds(y, limiter_.bounds_mode, problem_); }

  /// Face data at state y. `u_n` is the anchor when slope limiting uses the previous step.
  FaceData faces(std::span<const double> y, std::span<const double> u_n = {}) const {
    if (y.size() != grid_.n_cells) throw PreconditionError("state size does not match grid");
    auto iv = reconstruct(recon_, y);
    if (slope_.enabled) {
      const bool previous = slope_.anchor == SlopeLimitAnchor::PreviousStep && !u_n.empty();
      const auto anchor = previous ? u_n : y;
      iv = slope_limit_bp(iv, anchor, bounds(anchor));
    }
    return assemble_faces_from_traces(y, iv, problem_.flux);
  }

  /// Interface fluxes H*_{i+1/2}(y) after spatial limiting.
  std::vector<double> fluxes(std::span<const double> y, std::span<const double> u_n = {}) const {
    const auto fd = faces(y, u_n);
    if (limiter_.kind == LimiterKind::None) return fd.lf_high;
    return limited_fluxes(fd, y, limiter_, bounds(y));
  }

  std::vector<double> rhs(std::span<const double> y, std::span<const double> u_n = {}) const {
    std::vector<double> out(y.size());
    flux_divergence(fluxes(y, u_n), grid_.dx, out);
    return out;
  }

 private:
  Grid1D grid_;
  ProblemSpec problem_;
  Reconstruction recon_;
  LimiterConfig limiter_;
  SlopeLimitConfig slope_;
};

}  // namespace bpfv
