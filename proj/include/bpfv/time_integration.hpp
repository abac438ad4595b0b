#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bpfv/diagnostics.hpp"
#include "bpfv/errors.hpp"
#include "bpfv/grid.hpp"
#include "bpfv/limiters.hpp"
#include "bpfv/problem.hpp"
#include "bpfv/spatial_operator.hpp"
#include "bpfv/tableau.hpp"

namespace bpfv {

/// Optional instrumentation threaded through a single step.
struct StepHooks {
  /// Called with every stage value that is meant to be bound-preserving.
  std::function<void(std::span<const double>)> on_stage;
  /// Steps whose space-time limiting ran outside its bound-preserving CFL range.
  int cfl_violations = 0;
};

namespace detail {

inline void require_finite(std::span<const double> y, const std::string& where) {
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y[i])) throw NumericalError("non-finite value in " + where + " at cell " + std::to_string(i));
  }
}

inline void axpy(std::vector<double>& acc, double w, std::span<const double> x) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * x[i];
}

}  // namespace detail

/// Five-stage fourth-order SSP step in Shu-Osher form. Every stage evaluates the
/// operator's (possibly GMC-limited) right-hand side.
inline StateVector ssp54_step(std::span<const double> u_n, double dt, const SemiDiscreteOperator& op,
                              StepHooks* hooks = nullptr) {
  using C = Ssp54Coefficients;
  const std::size_t n = u_n.size();
  auto F = [&](std::span<const double> y) { return op.rhs(y, u_n); };
  auto emit = [&](const StateVector& y, int stage) {
    detail::require_finite(y, "SSP54 stage " + std::to_string(stage));
    if (hooks && hooks->on_stage) hooks->on_stage(y);
  };

  // Each convex combination is written relative to its last input, which is the
  // printed scheme up to rounding but keeps constants exact: the printed final
  // weights a52 + a53 + a54 evaluate to 1 + 9e-16 in double precision.
  const auto f0 = F(u_n);
  StateVector y1(n), y2(n), y3(n), y4(n), y5(n);
  for (std::size_t i = 0; i < n; ++i) y1[i] = u_n[i] + C::b10 * dt * f0[i];
  emit(y1, 1);
  const auto f1 = F(y1);
  for (std::size_t i = 0; i < n; ++i) y2[i] = y1[i] + C::a20 * (u_n[i] - y1[i]) + C::b21 * dt * f1[i];
  emit(y2, 2);
  const auto f2 = F(y2);
  for (std::size_t i = 0; i < n; ++i) y3[i] = y2[i] + C::a30 * (u_n[i] - y2[i]) + C::b32 * dt * f2[i];
  emit(y3, 3);
  const auto f3 = F(y3);
  for (std::size_t i = 0; i < n; ++i) y4[i] = y3[i] + C::a40 * (u_n[i] - y3[i]) + C::b43 * dt * f3[i];
  emit(y4, 4);
  const auto f4 = F(y4);
  for (std::size_t i = 0; i < n; ++i) {
    y5[i] = y4[i] + C::a52 * (y2[i] - y4[i]) + C::a53 * (y3[i] - y4[i]) + C::b53 * dt * f3[i] + C::b54 * dt * f4[i];
  }
  detail::require_finite(y5, "SSP54 stage 5");
  return y5;
}

/// How a Butcher-form step constrains its stages and final update.
struct SpaceTimeLimiting {
  bool stages = false;
  bool final_update = false;
  LimiterConfig limiter{LimiterKind::GMC, 0.0, BoundsMode::GlobalInitialData};
};

/// Explicit RK step in Butcher form with optional stagewise and final-stage
/// space-time limiting. Stage fluxes come from the operator (unlimited unless
/// the operator carries a spatial limiter).
inline StateVector generic_erk_step(const ButcherTableau& tab, std::span<const double> u_n, double dt,
                                    const SemiDiscreteOperator& op, const SpaceTimeLimiting& st = {},
                                    StepHooks* hooks = nullptr) {
  const std::size_t n = u_n.size();
  const std::size_t M = tab.stages;
  const Grid1D& grid = op.grid();
  const double r = dt / grid.dx;
  const bool limited = st.stages || st.final_update;

  std::optional<FaceData> faces_n;
  CellBounds bounds_n;
  if (limited) {
    faces_n = op.faces(u_n, u_n);
    bounds_n = cell_bounds(u_n, st.limiter.bounds_mode, op.problem());
  }
  auto count_cfl = [&](bool ok) {
    if (!ok && hooks) ++hooks->cfl_violations;
  };

  std::vector<std::vector<double>> h(M);
  StateVector y;
  for (std::size_t m = 0; m < M; ++m) {
    if (m == 0) {
      y.assign(u_n.begin(), u_n.end());
    } else {
      std::vector<double> g(n, 0.0);
      for (std::size_t s = 0; s < m; ++s) {
        if (tab(m, s) != 0.0) detail::axpy(g, tab(m, s), h[s]);
      }
      if (st.stages) {
        auto res = stage_limit(u_n, tab.c[m], g, *faces_n, st.limiter, dt, grid, bounds_n);
        count_cfl(res.cfl_ok);
        y = std::move(res.state);
        if (hooks && hooks->on_stage) hooks->on_stage(y);
      } else {
        y = conservative_update(u_n, g, r);
      }
      detail::require_finite(y, tab.name + " stage " + std::to_string(m + 1));
    }
    bool needed = tab.b[m] != 0.0;
    for (std::size_t later = m + 1; later < M && !needed; ++later) needed = tab(later, m) != 0.0;
    if (needed) h[m] = op.fluxes(y, u_n);
  }

  std::vector<double> g(n, 0.0);
  for (std::size_t m = 0; m < M; ++m) {
    if (tab.b[m] != 0.0) detail::axpy(g, tab.b[m], h[m]);
  }
  StateVector out;
  if (st.final_update) {
    auto res = final_stage_limit(u_n, *faces_n, g, st.limiter, dt, grid, bounds_n);
    count_cfl(res.cfl_ok);
    out = std::move(res.state);
  } else {
    out = conservative_update(u_n, g, r);
  }
  detail::require_finite(out, tab.name + " update");
  return out;
}

/// Stage values and stage fluxes of the fifth-order Euler extrapolation.
struct ExtrapolationStages {
  std::vector<StateVector> y;            // y^(1..11)
  std::vector<std::vector<double>> h;    // H*(y^(m))
};

/// Sequential Euler sub-steps y^(m) = y^(m-1) + (dt/s) F(y^(m-1)), each chain
/// restarting from u^n, with the operator's (spatially limited) fluxes.
inline ExtrapolationStages exe_rk5_stages(std::span<const double> u_n, double dt, const SemiDiscreteOperator& op,
                                          StepHooks* hooks = nullptr) {
  const double dx = op.grid().dx;
  ExtrapolationStages st;
  st.y.emplace_back(u_n.begin(), u_n.end());
  st.h.push_back(op.fluxes(u_n, u_n));
  for (int s = 2; s <= 5; ++s) {
    std::size_t prev = 0;
    for (int k = 1; k < s; ++k) {
      StateVector next = conservative_update(st.y[prev], st.h[prev], dt / s / dx);
      detail::require_finite(next, "ExE-RK5 stage " + std::to_string(st.y.size() + 1));
      if (hooks && hooks->on_stage) hooks->on_stage(next);
      st.y.push_back(std::move(next));
      st.h.push_back(op.fluxes(st.y.back(), u_n));
      prev = st.y.size() - 1;
    }
  }
  return st;
}

/// Aitken-Neville combination of the five Euler-completed approximations.
inline StateVector aitken_neville_update(const ExtrapolationStages& st, double dt, double dx) {
  static constexpr std::array<double, 5> w{1.0 / 24.0, -8.0 / 3.0, 81.0 / 4.0, -128.0 / 3.0, 625.0 / 24.0};
  static constexpr std::array<std::size_t, 5> last{0, 1, 3, 6, 10};
  const std::size_t n = st.y[0].size();
  StateVector out(n, 0.0);
  for (std::size_t j = 0; j < 5; ++j) {
    const auto completed = conservative_update(st.y[last[j]], st.h[last[j]], dt / static_cast<double>(j + 1) / dx);
    detail::axpy(out, w[j], completed);
  }
  return out;
}

/// ExE-RK5 step: spatially limited Euler chains, Butcher-form final update,
/// then optional final-stage space-time limiting.
inline StateVector exe_rk5_step(std::span<const double> u_n, double dt, const SemiDiscreteOperator& op,
                                const SpaceTimeLimiting& st = {}, StepHooks* hooks = nullptr) {
  const auto weights = extrapolation_weights(5);
  const auto stages = exe_rk5_stages(u_n, dt, op, hooks);
  const std::size_t n = u_n.size();
  std::vector<double> g(n, 0.0);
  for (std::size_t m = 0; m < weights.size(); ++m) {
    if (weights[m] != 0.0) detail::axpy(g, weights[m], stages.h[m]);
  }
  StateVector out;
  if (st.final_update) {
    const auto faces_n = op.faces(u_n, u_n);
    const auto bounds_n = cell_bounds(u_n, st.limiter.bounds_mode, op.problem());
    auto res = final_stage_limit(u_n, faces_n, g, st.limiter, dt, op.grid(), bounds_n);
    if (!res.cfl_ok && hooks) ++hooks->cfl_violations;
    out = std::move(res.state);
  } else {
    out = conservative_update(u_n, g, dt / op.grid().dx);
  }
  detail::require_finite(out, "ExE-RK5 update");
  return out;
}

// ---- Scheme presets and the time loop ----------------------------------------

enum class Integrator { ForwardEuler, SSP54, ExERK5, RK76 };

/// Resolved composition of a named scheme.
struct SchemePlan {
  Integrator integrator = Integrator::SSP54;
  LimiterKind spatial = LimiterKind::None;
  bool stage_limit = false;
  LimiterKind final_limit = LimiterKind::None;
  bool first_order = false;   // forces piecewise-constant traces
  bool semi_discrete = false; // no time stepping; compares the RHS itself
};

inline std::vector<std::string> scheme_names() {
  return {"llf",          "ssp54-baseline", "ssp54-gmc",   "ssp54-lmc",      "exe-rk5-baseline",
          "exe-rk5-gmc",  "rk76-baseline",  "rk76-gmc",    "sw-rk76-gmc",    "rk76-fct",
          "rk76-local-fct", "semidiscrete-weno", "semidiscrete-gmc"};
}

inline SchemePlan scheme_plan(const std::string& name) {
  SchemePlan p;
  if (name == "llf") {
    p.integrator = Integrator::ForwardEuler;
    p.first_order = true;
  } else if (name == "ssp54-baseline") {
    p.integrator = Integrator::SSP54;
  } else if (name == "ssp54-gmc") {
    p.integrator = Integrator::SSP54;
    p.spatial = LimiterKind::GMC;
  } else if (name == "ssp54-lmc") {
    p.integrator = Integrator::SSP54;
    p.spatial = LimiterKind::LMC;
  } else if (name == "exe-rk5-baseline") {
    p.integrator = Integrator::ExERK5;
  } else if (name == "exe-rk5-gmc") {
    p.integrator = Integrator::ExERK5;
    p.spatial = LimiterKind::GMC;
    p.final_limit = LimiterKind::GMC;
  } else if (name == "rk76-baseline") {
    p.integrator = Integrator::RK76;
  } else if (name == "rk76-gmc") {
    p.integrator = Integrator::RK76;
    p.final_limit = LimiterKind::GMC;
  } else if (name == "sw-rk76-gmc") {
    p.integrator = Integrator::RK76;
    p.stage_limit = true;
    p.final_limit = LimiterKind::GMC;
  } else if (name == "rk76-fct") {
    p.integrator = Integrator::RK76;
    p.final_limit = LimiterKind::FCT;
  } else if (name == "rk76-local-fct") {
    p.integrator = Integrator::RK76;
    p.final_limit = LimiterKind::LocalFCT;
  } else if (name == "semidiscrete-weno") {
    p.semi_discrete = true;
  } else if (name == "semidiscrete-gmc") {
    p.semi_discrete = true;
    p.spatial = LimiterKind::GMC;
  } else {
    throw ConfigError("unknown scheme '" + name + "'");
  }
  return p;
}

/// Whether a plan guarantees bounds (given the CFL condition).
inline bool is_bound_preserving(const SchemePlan& p) {
  if (p.first_order) return true;
  if (p.integrator == Integrator::SSP54) return p.spatial != LimiterKind::None;
  return p.final_limit != LimiterKind::None;
}

struct SchemeConfig {
  std::string scheme = "ssp54-gmc";
  double gamma = 0.0;
  BoundsMode bounds_mode = BoundsMode::GlobalInitialData;
  double cfl_number = 0.4;
  Reconstruction reconstruction = Reconstruction::WENO5;
  SlopeLimitConfig slope;
  /// Also sample delta at bound-preserving intermediate stages, not only after steps.
  bool sample_stages = false;
};

struct RunReport {
  std::optional<double> e1;
  double delta_minus = 0.0;
  double delta_plus = 0.0;
  double delta = 0.0;
  double mass_initial = 0.0;
  double mass_final = 0.0;
  std::size_t n_steps = 0;
  int cfl_warnings = 0;
  double final_time = 0.0;
  double dt = 0.0;
  double wall_time_s = 0.0;

  double mass_drift() const {
    const double scale = std::max(std::abs(mass_initial), 1e-300);
    return std::abs(mass_final - mass_initial) / scale;
  }
};

struct RunResult {
  StateVector state;
  RunReport report;
};

/// u_exact(x) at the final time, when one is available.
using ExactProfile = std::function<double(double)>;

inline SemiDiscreteOperator make_operator(const SchemeConfig& cfg, const SchemePlan& plan, const Grid1D& grid,
                                          const ProblemSpec& problem) {
  const Reconstruction recon = plan.first_order ? Reconstruction::FirstOrder : cfg.reconstruction;
  LimiterConfig spatial{plan.spatial, cfg.gamma, cfg.bounds_mode};
  return SemiDiscreteOperator(grid, problem, recon, spatial, cfg.slope);
}

/// Advances from t = 0 to problem.final_time with dt = cfl * dx / (1 + gamma),
/// clipping the last step. Tracks delta after every step (and every limited stage).
inline RunResult run_simulation(const SchemeConfig& cfg, const ProblemSpec& problem, const Grid1D& grid,
                                const ExactProfile& exact = {}) {
  const auto plan = scheme_plan(cfg.scheme);
  if (plan.semi_discrete) throw ConfigError("semi-discrete schemes are evaluated with semi_discrete_error");
  if (!(cfg.cfl_number > 0.0)) throw ConfigError("cfl number must be positive");
  if (cfg.gamma < 0.0) throw ConfigError("gamma must be >= 0");
  const auto t0 = std::chrono::steady_clock::now();

  const SemiDiscreteOperator op = make_operator(cfg, plan, grid, problem);
  const double gamma_eff = is_bound_preserving(plan) && !plan.first_order ? cfg.gamma : 0.0;
  SpaceTimeLimiting st;
  st.stages = plan.stage_limit;
  st.final_update = plan.final_limit != LimiterKind::None;
  st.limiter = LimiterConfig{plan.final_limit, cfg.gamma, cfg.bounds_mode};
  const ButcherTableau tableau = plan.integrator == Integrator::RK76 ? rk76_tableau() : forward_euler_tableau();

  RunResult res;
  StateVector u = initial_cell_averages(problem, grid);
  BoundViolationTracker tracker(problem.global_umin, problem.global_umax);
  tracker.observe(u);
  res.report.mass_initial = total_mass(u, grid.dx);

  StepHooks hooks;
  const bool bp_stages = plan.stage_limit || plan.spatial != LimiterKind::None;
  if (cfg.sample_stages && bp_stages) hooks.on_stage = [&](std::span<const double> y) { tracker.observe(y); };

  const double T = problem.final_time;
  const double dt_nominal = cfg.cfl_number * grid.dx / (1.0 + cfg.gamma);
  const auto n_steps = T > 0.0 ? static_cast<std::size_t>(std::ceil(T / dt_nominal - 1e-9)) : 0;
  int cfl_warned = 0;
  for (std::size_t step = 0; step < n_steps; ++step) {
    const double t = static_cast<double>(step) * dt_nominal;
    const double dt = step + 1 == n_steps ? T - t : dt_nominal;
    try {
      if (plan.integrator == Integrator::SSP54 || plan.integrator == Integrator::ForwardEuler) {
        // SSP coefficient taken as 1 for the runtime CFL audit.
        const auto fd = op.faces(u, u);
        if (bp_cfl_number(fd, dt, grid.dx, gamma_eff) > 1.0 + 1e-12) ++cfl_warned;
      }
      switch (plan.integrator) {
        case Integrator::ForwardEuler:
          u = conservative_update(u, op.fluxes(u, u), dt / grid.dx);
          detail::require_finite(u, "forward Euler update");
          break;
        case Integrator::SSP54:
          u = ssp54_step(u, dt, op, &hooks);
          break;
        case Integrator::ExERK5:
          u = exe_rk5_step(u, dt, op, st, &hooks);
          break;
        case Integrator::RK76:
          u = generic_erk_step(tableau, u, dt, op, st, &hooks);
          break;
      }
    } catch (const NumericalError& e) {
      throw NumericalError(std::string(e.what()) + " (t = " + std::to_string(t) + ")");
    }
    tracker.observe(u);
  }
  if (cfl_warned + hooks.cfl_violations > 0) {
    std::cerr << "warning: " << (cfl_warned + hooks.cfl_violations)
              << " step(s) exceeded the bound-preserving CFL limit (" << cfg.scheme << ", N=" << grid.n_cells
              << ")\n";
  }

  auto& rep = res.report;
  rep.n_steps = n_steps;
  rep.cfl_warnings = cfl_warned + hooks.cfl_violations;
  rep.final_time = T;
  rep.dt = dt_nominal;
  rep.mass_final = total_mass(u, grid.dx);
  rep.delta_minus = tracker.result().delta_minus;
  rep.delta_plus = tracker.result().delta_plus;
  rep.delta = tracker.result().delta();
  if (exact) rep.e1 = l1_error(u, grid, exact);
  rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  res.state = std::move(u);
  return res;
}

/// Error norm for the semi-discrete test.
///   TimeDerivative: dx * sum |du_i/dt - RHS_i|
///   FluxDifference: dx * sum |dx (du_i/dt - RHS_i)|, i.e. the error in the
///   interface-flux differences. The published semi-discrete table uses this one.
enum class SemiDiscreteMetric { FluxDifference, TimeDerivative };

inline std::string to_string(SemiDiscreteMetric m) {
  return m == SemiDiscreteMetric::FluxDifference ? "flux-difference" : "time-derivative";
}

inline SemiDiscreteMetric semi_discrete_metric_from_string(const std::string& s) {
  if (s == "flux-difference") return SemiDiscreteMetric::FluxDifference;
  if (s == "time-derivative") return SemiDiscreteMetric::TimeDerivative;
  throw ConfigError("unknown semi-discrete metric '" + s + "' (expected flux-difference|time-derivative)");
}

/// Exact cell-average derivative -(f(u(x_{i+1/2})) - f(u(x_{i-1/2}))) / dx of the initial data.
inline std::vector<double> exact_average_derivative(const ProblemSpec& problem, const Grid1D& grid) {
  std::vector<double> face_flux(grid.n_cells), out(grid.n_cells);
  for (std::size_t k = 0; k < grid.n_cells; ++k) {
    face_flux[k] = problem.flux(initial_value(problem, wrap_coordinate(problem, grid.face(k))));
  }
  flux_divergence(face_flux, grid.dx, out);
  return out;
}

/// Semi-discrete accuracy of the scheme's RHS at t = 0 against the exact derivative.
inline double semi_discrete_error(const SchemeConfig& cfg, const ProblemSpec& problem, const Grid1D& grid,
                                  SemiDiscreteMetric metric = SemiDiscreteMetric::FluxDifference,
                                  std::vector<double>* rhs_out = nullptr) {
  const auto plan = scheme_plan(cfg.scheme);
  const SemiDiscreteOperator op = make_operator(cfg, plan, grid, problem);
  const auto u = initial_cell_averages(problem, grid);
  const auto rhs = op.rhs(u);
  const auto exact = exact_average_derivative(problem, grid);
  if (rhs_out) *rhs_out = rhs;
  const double e = l1_distance(rhs, exact, grid.dx);
  return metric == SemiDiscreteMetric::FluxDifference ? grid.dx * e : e;
}

}  // namespace bpfv
