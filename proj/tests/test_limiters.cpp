#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "bpfv/limiters.hpp"
#include "bpfv/spatial_operator.hpp"
#include "bpfv/time_integration.hpp"

using namespace bpfv;

namespace {

CellBounds uniform_bounds(std::size_t n, double lo, double hi) {
  return {std::vector<double>(n, lo), std::vector<double>(n, hi)};
}

// Net limited flux into cell i: +alpha_i F_i - alpha_{i-1} F_{i-1}.
double net_flux(const std::vector<double>& f, const std::vector<double>& alpha, std::size_t i) {
  const std::size_t l = i == 0 ? f.size() - 1 : i - 1;
  return alpha[i] * f[i] - alpha[l] * f[l];
}

}  // namespace

TEST(CellBounds, Examples) {
  const auto p = advection_nonsmooth();
  const std::vector<double> c(6, 0.4);
  const auto local = cell_bounds(c, BoundsMode::LocalStencil, p);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(local.lower[i], 0.4);
    EXPECT_EQ(local.upper[i], 0.4);
  }
  const auto global = cell_bounds(c, BoundsMode::GlobalInitialData, p);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(global.lower[i], 0.0);
    EXPECT_EQ(global.upper[i], 1.0);
  }
  const std::vector<double> ramp{0.0, 1.0, 2.0};
  const auto r = cell_bounds(ramp, BoundsMode::LocalStencil, p);
  EXPECT_EQ(r.lower[1], 0.0);
  EXPECT_EQ(r.upper[1], 2.0);
}

TEST(GmcBounds, UpperBoundVanishesAtTheMaximum) {
  const std::vector<double> u{1.0}, ubar{1.0}, d{2.0};
  const auto q = gmc_bounds(u, ubar, d, uniform_bounds(1, 0.0, 1.0), 0.7);
  EXPECT_EQ(q.qplus[0], 0.0);
}

TEST(GmcBounds, LinearInGamma) {
  const std::vector<double> u{0.3}, ubar{0.4}, d{2.5};
  const auto b = uniform_bounds(1, 0.0, 1.0);
  const auto q0 = gmc_bounds(u, ubar, d, b, 0.0), q1 = gmc_bounds(u, ubar, d, b, 1.5);
  EXPECT_NEAR(q1.qplus[0] - q0.qplus[0], 2.5 * 1.5 * (1.0 - 0.3), 1e-15);
  EXPECT_NEAR(q1.qminus[0] - q0.qminus[0], 2.5 * 1.5 * (0.0 - 0.3), 1e-15);
}

TEST(GmcBounds, UpwindBarStatesByHand) {
  const auto p = advection_nonsmooth();
  const auto g = make_grid(6, p.domain);
  const std::vector<double> u{0.0, 0.0, 1.0, 0.0, 0.0, 0.0};
  const auto fd = assemble_faces(u, Reconstruction::WENO5, g, p);
  const auto q = gmc_bounds(fd, u, uniform_bounds(6, 0.0, 1.0), 0.0);
  EXPECT_NEAR(q.qplus[2], 1.0, 1e-15);
  EXPECT_NEAR(q.qminus[2], -1.0, 1e-15);
}

TEST(Zalesak, ZeroFluxesGiveUnitFactors) {
  const std::vector<double> f(5, 0.0);
  BoundsPair q{std::vector<double>(5, -1.0), std::vector<double>(5, 1.0)};
  for (double a : zalesak_factors(f, q).alpha) EXPECT_EQ(a, 1.0);
}

TEST(Zalesak, RatioOfBoundToInflow) {
  // Cell 1 receives +F_1 = 2 (outflow to the left-neighbor flux is zero), Q^+ = 1.
  const std::vector<double> f{0.0, 2.0, 0.0, 0.0};
  BoundsPair q{std::vector<double>(4, -10.0), std::vector<double>(4, 10.0)};
  q.qplus[1] = 1.0;
  const auto cf = zalesak_factors(f, q);
  EXPECT_DOUBLE_EQ(cf.alpha[1], 0.5);
}

TEST(Zalesak, RandomConfigurationsRespectBounds) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> F(-1.0, 1.0), Q(0.0, 1.0), S(0.0, 1.0);
  std::uniform_int_distribution<int> N(2, 12);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = static_cast<std::size_t>(N(rng));
    std::vector<double> f(n);
    BoundsPair q{std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
      f[i] = S(rng) < 0.1 ? 0.0 : F(rng);
      q.qplus[i] = S(rng) < 0.1 ? 0.0 : Q(rng);
      q.qminus[i] = S(rng) < 0.1 ? 0.0 : -Q(rng);
    }
    const auto cf = zalesak_factors(f, q);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_GE(cf.alpha[i], 0.0);
      EXPECT_LE(cf.alpha[i], 1.0);
      const double s = net_flux(f, cf.alpha, i);
      EXPECT_GE(s, q.qminus[i] - 1e-12) << "trial " << trial;
      EXPECT_LE(s, q.qplus[i] + 1e-12) << "trial " << trial;
    }
  }
}

TEST(Zalesak, HomogeneousOfDegreeZero) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> F(-1.0, 1.0), Q(0.0, 1.0);
  const std::size_t n = 50;
  std::vector<double> f(n), f2(n);
  BoundsPair q{std::vector<double>(n), std::vector<double>(n)}, q2 = q;
  for (std::size_t i = 0; i < n; ++i) {
    f[i] = F(rng);
    q.qplus[i] = Q(rng);
    q.qminus[i] = -Q(rng);
    f2[i] = 4.0 * f[i];
    q2.qplus[i] = 4.0 * q.qplus[i];
    q2.qminus[i] = 4.0 * q.qminus[i];
  }
  EXPECT_EQ(zalesak_factors(f, q).alpha, zalesak_factors(f2, q2).alpha);
}

TEST(Lmc, ZeroAndInactiveFluxes) {
  FacewiseBounds fb{{-1.0, -1.0}, {1.0, 1.0}, {-1.0, -1.0}, {1.0, 1.0}};
  EXPECT_EQ(clip_fluxes(std::vector<double>{0.0, 0.0}, fb), (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(clip_fluxes(std::vector<double>{0.5, -0.3}, fb), (std::vector<double>{0.5, -0.3}));
}

TEST(Lmc, RandomClippingRespectsBothFaces) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> U(0.0, 1.0), F(-2.0, 2.0);
  const Flux kpp{FluxKind::KPP};
  const std::size_t n = 40;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> u(n), f(n);
    for (auto& v : u) v = U(rng);
    for (auto& v : f) v = F(rng);
    const auto fd = assemble_faces_from_traces(u, first_order_reconstruct(u), kpp);
    const auto b = cell_bounds(u, BoundsMode::LocalStencil, kpp_step());
    const double gamma = 2.0 * U(rng);
    const auto fb = lmc_face_bounds(u, fd, b, gamma);
    const auto out = lmc_limit(f, u, fd, b, gamma);
    for (std::size_t k = 0; k < n; ++k) {
      EXPECT_GE(out[k], fb.left_minus[k] - 1e-15);
      EXPECT_LE(out[k], fb.left_plus[k] + 1e-15);
      EXPECT_GE(out[k], -fb.right_plus[k] - 1e-15);
      EXPECT_LE(out[k], -fb.right_minus[k] + 1e-15);
      EXPECT_LE(std::abs(out[k]), std::abs(f[k]));
      EXPECT_GE(out[k] * f[k], 0.0);
    }
  }
}

TEST(FctBounds, Examples) {
  const auto b = uniform_bounds(2, 0.0, 1.0);
  const std::vector<double> ufe{0.0, 0.5};
  const auto q = fct_bounds(ufe, 0.1, 0.01, b, false);
  EXPECT_EQ(q.qminus[0], 0.0);
  const auto half_dt = fct_bounds(ufe, 0.05, 0.01, b, false);
  EXPECT_NEAR(half_dt.qplus[1], 2.0 * q.qplus[1], 1e-15);
  EXPECT_NEAR(half_dt.qminus[1], 2.0 * q.qminus[1], 1e-15);
  const auto local = fct_bounds(ufe, 0.1, 0.01, b, true);
  EXPECT_NEAR(local.qplus[1], 0.5 * q.qplus[1], 1e-15);
  EXPECT_NEAR(local.qminus[1], 0.5 * q.qminus[1], 1e-15);
  EXPECT_THROW(fct_bounds(std::vector<double>{1.5, 0.5}, 0.1, 0.01, b, false), PreconditionError);
}

namespace {

struct LimitingFixture {
  ProblemSpec p = advection_nonsmooth();
  Grid1D g = make_grid(100, p.domain);
  StateVector u = initial_cell_averages(p, g);
  SemiDiscreteOperator op{g, p, Reconstruction::WENO5, {LimiterKind::None}};
  FaceData faces = op.faces(u, u);
  CellBounds bounds = cell_bounds(u, BoundsMode::GlobalInitialData, p);
  double dt = 0.4 * g.dx;
};

}  // namespace

TEST(FinalStageLimit, UnitFactorsGiveUnlimitedUpdate) {
  LimitingFixture fx;
  const auto h = fx.faces.lf_high;
  const auto res = final_stage_limit(fx.u, fx.faces, h, {LimiterKind::None}, fx.dt, fx.g, fx.bounds);
  EXPECT_EQ(res.state, conservative_update(fx.u, h, fx.dt / fx.g.dx));
}

TEST(FinalStageLimit, ZeroFactorsGiveLowOrderPredictor) {
  // Constant state with collapsed bounds: every nonzero antidiffusive flux is cancelled.
  const auto p = with_constant_ic(advection_nonsmooth(), 0.3);
  const auto g = make_grid(20, p.domain);
  const std::vector<double> u(20, 0.3);
  const auto fd = assemble_faces(u, Reconstruction::WENO5, g, p);
  std::vector<double> h(20);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (auto& v : h) v = U(rng);
  const auto b = cell_bounds(u, BoundsMode::GlobalInitialData, p);
  const double dt = 0.4 * g.dx;
  const auto res = final_stage_limit(u, fd, h, {LimiterKind::GMC, 0.0}, dt, g, b);
  const auto ufe = conservative_update(u, fd.lf_low, dt / g.dx);
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(res.state[i], ufe[i], 1e-15);
}

TEST(FinalStageLimit, GmcAndFctKeepBoundsAndMass) {
  LimitingFixture fx;
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> U(-0.5, 1.5);
  std::vector<double> h(fx.u.size());
  for (auto& v : h) v = U(rng);
  const double mass = total_mass(fx.u, fx.g.dx);
  for (auto kind : {LimiterKind::GMC, LimiterKind::FCT, LimiterKind::LocalFCT, LimiterKind::LMC}) {
    const auto res = final_stage_limit(fx.u, fx.faces, h, {kind, 0.0}, fx.dt, fx.g, fx.bounds);
    EXPECT_TRUE(res.cfl_ok);
    for (double v : res.state) {
      EXPECT_GE(v, -1e-12) << to_string(kind);
      EXPECT_LE(v, 1.0 + 1e-12) << to_string(kind);
    }
    EXPECT_NEAR(total_mass(res.state, fx.g.dx), mass, 1e-12 * mass) << to_string(kind);
  }
}

TEST(StageLimit, ZeroAbscissaReturnsPreviousStep) {
  LimitingFixture fx;
  const std::vector<double> g(fx.u.size(), 0.0);
  const auto res = stage_limit(fx.u, 0.0, g, fx.faces, {LimiterKind::GMC, 0.0}, fx.dt, fx.g, fx.bounds);
  EXPECT_EQ(res.state, fx.u);
}

TEST(StageLimit, RejectsNegativeAbscissa) {
  LimitingFixture fx;
  const std::vector<double> g(fx.u.size(), 0.0);
  EXPECT_THROW(stage_limit(fx.u, -0.1, g, fx.faces, {LimiterKind::GMC}, fx.dt, fx.g, fx.bounds), PreconditionError);
}

TEST(SpaceTimeFactors, GmcIndependentOfTimeStepFctNot) {
  LimitingFixture fx;
  const auto g = fx.faces.lf_high;
  const auto a1 = space_time_factors(fx.u, 1.0, g, fx.faces, {LimiterKind::GMC, 0.5}, fx.dt, fx.g, fx.bounds);
  const auto a2 = space_time_factors(fx.u, 1.0, g, fx.faces, {LimiterKind::GMC, 0.5}, 0.3 * fx.dt, fx.g, fx.bounds);
  EXPECT_EQ(a1.alpha, a2.alpha);
  const auto f1 = space_time_factors(fx.u, 1.0, g, fx.faces, {LimiterKind::FCT}, fx.dt, fx.g, fx.bounds);
  const auto f2 = space_time_factors(fx.u, 1.0, g, fx.faces, {LimiterKind::FCT}, 0.3 * fx.dt, fx.g, fx.bounds);
  EXPECT_NE(f1.alpha, f2.alpha);
}

TEST(SpatialGmc, FactorsIndependentOfTimeStep) {
  // The semi-discrete GMC flux only sees the state; no dt enters.
  LimitingFixture fx;
  const auto b = gmc_bounds(fx.faces, fx.u, fx.bounds, 0.0);
  const auto once = zalesak_factors(fx.faces.antidiff, b).alpha;
  const auto again = zalesak_factors(fx.faces.antidiff, gmc_bounds(fx.faces, fx.u, fx.bounds, 0.0)).alpha;
  EXPECT_EQ(once, again);
}

TEST(StageLimit, SwRk76StagesStayInBounds) {
  const auto p = advection_nonsmooth();
  const auto g = make_grid(200, p.domain);
  SemiDiscreteOperator op(g, p, Reconstruction::WENO5, {LimiterKind::None});
  SpaceTimeLimiting st{true, true, {LimiterKind::GMC, 0.0, BoundsMode::GlobalInitialData}};
  StepHooks hooks;
  double worst = 0.0;
  std::size_t stages = 0;
  hooks.on_stage = [&](std::span<const double> y) {
    ++stages;
    for (double v : y) worst = std::min({worst, v, 1.0 - v});
  };
  auto u = initial_cell_averages(p, g);
  const double dt = 0.4 * g.dx;
  const auto tab = rk76_tableau();
  for (int step = 0; step < 250; ++step) u = generic_erk_step(tab, u, dt, op, st, &hooks);
  EXPECT_EQ(stages, 250u * 6u);
  EXPECT_GE(worst, -1e-12);
  EXPECT_EQ(hooks.cfl_violations, 0);
}
