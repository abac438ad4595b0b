#pragma once

#include <span>
#include <vector>

#include "bpfv/grid.hpp"
#include "bpfv/problem.hpp"
#include "bpfv/reconstruction.hpp"

namespace bpfv {

/// Lax-Friedrichs flux H(uL, uR) = (f(uR) + f(uL))/2 - lambda/2 (uR - uL).
inline double lf_flux(double u_left, double u_right, double lambda, const Flux& flux) {
  return 0.5 * (flux(u_right) + flux(u_left)) - 0.5 * lambda * (u_right - u_left);
}

/// Intermediate state of the two-wave LF Riemann fan. Lies between u_left and
/// u_right whenever lambda bounds |f'| on that interval.
inline double bar_state_low(double u_left, double u_right, double lambda, const Flux& flux) {
  return 0.5 * (u_right + u_left) - (flux(u_right) - flux(u_left)) / (2.0 * lambda);
}

/// Per-interface data; entry k belongs to x_{k+1/2} between cells k and k+1.
/// antidiff = lf_low - lf_high: cell k gains +antidiff[k], cell k+1 gains -antidiff[k].
struct FaceData {
  std::vector<double> lf_low;
  std::vector<double> lf_high;
  std::vector<double> lambda;
  std::vector<double> bar_low;
  std::vector<double> antidiff;

  std::size_t size() const { return lambda.size(); }
};

inline FaceData assemble_faces_from_traces(std::span<const double> u, const InterfaceValues& iv,
                                           const Flux& flux) {
  const std::size_t n = u.size();
  FaceData fd;
  fd.lf_low.resize(n);
  fd.lf_high.resize(n);
  fd.lambda.resize(n);
  fd.bar_low.resize(n);
  fd.antidiff.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = k + 1 == n ? 0 : k + 1;
    const double ul = u[k], ur = u[j];
    const double tl = iv.plus[k], tr = iv.minus[j];
    const double lam = wave_speed_bound(flux, ul, ur, tl, tr);
    fd.lambda[k] = lam;
    fd.lf_low[k] = lf_flux(ul, ur, lam, flux);
    fd.lf_high[k] = lf_flux(tl, tr, lam, flux);
    fd.bar_low[k] = bar_state_low(ul, ur, lam, flux);
    fd.antidiff[k] = fd.lf_low[k] - fd.lf_high[k];
  }
  return fd;
}

inline FaceData assemble_faces(std::span<const double> u, Reconstruction kind, const Grid1D& grid,
                               const ProblemSpec& problem) {
  if (u.size() != grid.n_cells) throw PreconditionError("state size does not match grid");
  return assemble_faces_from_traces(u, reconstruct(kind, u), problem.flux);
}

/// d_i = lambda_{i+1/2} + lambda_{i-1/2}.
inline std::vector<double> lambda_sums(const FaceData& faces) {
  const std::size_t n = faces.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = faces.lambda[i] + faces.lambda[i == 0 ? n - 1 : i - 1];
  return d;
}

/// First-order LLF right-hand side in fluctuation (bar state) form:
/// [lambda_{i+1/2}(ubar_{i+1/2} - u_i) + lambda_{i-1/2}(ubar_{i-1/2} - u_i)] / dx.
inline std::vector<double> low_order_rhs(const FaceData& faces, std::span<const double> u,
                                         const Grid1D& grid) {
  const std::size_t n = u.size();
  std::vector<double> rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t l = i == 0 ? n - 1 : i - 1;
    rhs[i] = (faces.lambda[i] * (faces.bar_low[i] - u[i]) + faces.lambda[l] * (faces.bar_low[l] - u[i])) /
             grid.dx;
  }
  return rhs;
}

/// Same operator written as a flux difference of the low-order LF fluxes.
inline std::vector<double> low_order_rhs_flux_form(const FaceData& faces, const Grid1D& grid) {
  std::vector<double> rhs(faces.size());
  flux_divergence(faces.lf_low, grid.dx, rhs);
  return rhs;
}

/// Unlimited high-order right-hand side -(H^high_{i+1/2} - H^high_{i-1/2}) / dx.
inline std::vector<double> high_order_rhs(const FaceData& faces, const Grid1D& grid) {
  std::vector<double> rhs(faces.size());
  flux_divergence(faces.lf_high, grid.dx, rhs);
  return rhs;
}

}  // namespace bpfv
