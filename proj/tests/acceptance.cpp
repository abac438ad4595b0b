// Acceptance run: one PASS/FAIL line per criterion, sub-checks indented below.
// Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "bpfv/experiment.hpp"

using namespace bpfv;

namespace {

struct SubCheck {
  bool ok;
  std::string text;
};

class Criterion {
 public:
  explicit Criterion(std::string title) : title_(std::move(title)) {}

  bool check(bool ok, const std::string& text) {
    subs_.push_back({ok, text});
    return ok;
  }
  bool passed() const {
    return std::all_of(subs_.begin(), subs_.end(), [](const SubCheck& s) { return s.ok; });
  }
  void print(int number) const {
    std::cout << (passed() ? "PASS" : "FAIL") << "  criterion " << number << ": " << title_ << "\n";
    for (const auto& s : subs_) std::cout << "        [" << (s.ok ? "ok" : "fail") << "] " << s.text << "\n";
    std::cout.flush();
  }

 private:
  std::string title_;
  std::vector<SubCheck> subs_;
};

std::string sci(double v) { return format_sci3(v); }

std::string fixed2(double v) { return format_eoc(v); }

std::string rate(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

bool within_rel(double v, double target, double rel) { return std::abs(v - target) <= rel * std::abs(target); }

const std::vector<std::size_t> kTableMeshes{25, 50, 100, 200, 400, 800, 1600};
const std::vector<std::size_t> kKppMeshes{100, 200, 400, 800, 1600};

struct Context {
  std::string reference_dir = "reference";
  unsigned jobs = 1;
  // every time-dependent benchmark run, for the mass audit
  std::vector<std::pair<std::string, double>> mass_drifts;
};

std::vector<ConvergenceRow> study(Context& ctx, const std::string& problem, const std::string& scheme, double gamma,
                                  const std::vector<std::size_t>& meshes,
                                  Reconstruction recon = Reconstruction::WENO5) {
  RunConfig c;
  c.problem = problem;
  c.scheme = scheme;
  c.gamma = gamma;
  c.meshes = meshes;
  c.recon = recon;
  c.jobs = ctx.jobs;
  c.reference_dir = ctx.reference_dir;
  auto rows = convergence_study(c);
  if (!scheme_plan(scheme).semi_discrete) {
    for (const auto& r : rows) {
      ctx.mass_drifts.emplace_back(problem + "/" + scheme + "/g" + fixed2(gamma) + "/N" + std::to_string(r.n),
                                   r.report.mass_drift());
    }
  }
  return rows;
}

const ConvergenceRow& at(const std::vector<ConvergenceRow>& rows, std::size_t n) {
  for (const auto& r : rows) {
    if (r.n == n) return r;
  }
  throw std::runtime_error("mesh " + std::to_string(n) + " missing");
}

double e1(const std::vector<ConvergenceRow>& rows, std::size_t n) { return at(rows, n).report.e1.value_or(NAN); }

double min_delta(const std::vector<ConvergenceRow>& rows) {
  double d = INFINITY;
  for (const auto& r : rows) d = std::min(d, r.report.delta);
  return d;
}

Criterion semi_discrete(Context& ctx) {
  Criterion c("semi-discrete accuracy (WENO and GMC right-hand sides)");
  const auto weno = study(ctx, "burgers-gaussian", "semidiscrete-weno", 0.0, kTableMeshes);
  c.check(within_rel(e1(weno, 100), 1.04e-6, 0.05), "WENO E1(N=100) = " + sci(e1(weno, 100)) + ", want 1.04e-06 +-5%");
  const double r1600 = at(weno, 1600).eoc;
  c.check(r1600 >= 5.8 && r1600 <= 6.3, "WENO EOC(N=1600) = " + rate(r1600) + ", want [5.8, 6.3]");

  const auto gmc0 = study(ctx, "burgers-gaussian", "semidiscrete-gmc", 0.0, kTableMeshes);
  for (const auto& r : gmc0) {
    if (r.n < 200) continue;
    c.check(r.eoc >= 2.8 && r.eoc <= 3.1,
            "GMC gamma=0 EOC(N=" + std::to_string(r.n) + ") = " + rate(r.eoc) + ", want [2.8, 3.1]");
  }

  const auto p = burgers_gaussian();
  for (double gamma : {0.5, 1.0}) {
    bool equal = true;
    for (std::size_t n : kTableMeshes) {
      if (n < 50) continue;
      const auto g = make_grid(n, p.domain);
      SchemeConfig w, l;
      w.scheme = "semidiscrete-weno";
      l.scheme = "semidiscrete-gmc";
      l.gamma = gamma;
      std::vector<double> rw, rl;
      semi_discrete_error(w, p, g, SemiDiscreteMetric::FluxDifference, &rw);
      semi_discrete_error(l, p, g, SemiDiscreteMetric::FluxDifference, &rl);
      equal = equal && rw == rl;
    }
    c.check(equal, "GMC gamma=" + fixed2(gamma) + " RHS bitwise equal to WENO for N >= 50");
  }
  return c;
}

Criterion linear_advection(Context& ctx) {
  Criterion c("linear advection with RK76 and space-time GMC");
  struct Variant {
    const char* scheme;
    double gamma;
  };
  for (const Variant v : {Variant{"rk76-baseline", 0.0}, Variant{"rk76-gmc", 0.0}, Variant{"rk76-gmc", 1.0}}) {
    const auto rows = study(ctx, "advection-smooth", v.scheme, v.gamma, kTableMeshes);
    const std::string tag = std::string(v.scheme) + " gamma=" + fixed2(v.gamma);
    c.check(within_rel(e1(rows, 400), 1.35e-7, 0.05), tag + " E1(N=400) = " + sci(e1(rows, 400)) + ", want 1.35e-07 +-5%");
    const double r = at(rows, 400).eoc;
    c.check(r >= 4.8 && r <= 5.1, tag + " EOC(N=400) = " + rate(r) + ", want [4.8, 5.1]");
    if (std::string(v.scheme) == "rk76-baseline") {
      const double d = at(rows, 25).report.delta;
      c.check(within_rel(d, -2.0e-5, 0.2), tag + " delta(N=25) = " + sci(d) + ", want -2.0e-05 +-20%");
    } else {
      c.check(min_delta(rows) >= -1e-12, tag + " min delta = " + sci(min_delta(rows)) + ", want >= -1e-12");
    }
  }
  const auto sw0 = study(ctx, "advection-smooth", "sw-rk76-gmc", 0.0, kTableMeshes);
  const auto sw1 = study(ctx, "advection-smooth", "sw-rk76-gmc", 1.0, kTableMeshes);
  c.check(at(sw0, 1600).eoc <= 3.3, "sw-rk76-gmc gamma=0 EOC(N=1600) = " + rate(at(sw0, 1600).eoc) + ", want <= 3.3");
  c.check(at(sw1, 1600).eoc >= 4.9, "sw-rk76-gmc gamma=1 EOC(N=1600) = " + rate(at(sw1, 1600).eoc) + ", want >= 4.9");
  for (const auto* rows : {&sw0, &sw1}) {
    c.check(min_delta(*rows) >= -1e-12, "sw-rk76-gmc min delta = " + sci(min_delta(*rows)) + ", want >= -1e-12");
  }
  return c;
}

Criterion nonsmooth_advection(Context& ctx) {
  Criterion c("nonsmooth advection over 100 periods");
  auto p = advection_nonsmooth();
  p.final_time = 100.0;
  const auto g = make_grid(200, p.domain);
  SchemeConfig base, gmc;
  base.scheme = "ssp54-baseline";
  gmc.scheme = "ssp54-gmc";
  const auto rb = run_simulation(base, p, g);
  const auto rg = run_simulation(gmc, p, g);
  ctx.mass_drifts.emplace_back("advection-nonsmooth/ssp54-baseline/t100", rb.report.mass_drift());
  ctx.mass_drifts.emplace_back("advection-nonsmooth/ssp54-gmc/t100", rg.report.mass_drift());
  c.check(rb.report.delta >= -2e-2 && rb.report.delta <= -8e-3,
          "ssp54-baseline delta = " + sci(rb.report.delta) + ", want [-2e-02, -8e-03]");
  c.check(rg.report.delta >= -1e-12, "ssp54-gmc delta = " + sci(rg.report.delta) + ", want >= -1e-12");

  double worst = 0.0;
  std::size_t cells = 0;
  for (std::size_t i = 0; i < g.n_cells; ++i) {
    const double b = rb.state[i];
    if (b - p.global_umin > 1e-3 && p.global_umax - b > 1e-3) {
      ++cells;
      worst = std::max(worst, std::abs(b - rg.state[i]));
    }
  }
  c.check(worst <= 1e-10, "max |gmc - baseline| on " + std::to_string(cells) + " interior cells = " + sci(worst) +
                              ", want <= 1e-10");
  return c;
}

Criterion burgers(Context& ctx) {
  Criterion c("Burgers equation before the shock");
  const std::vector<std::size_t> one{100, 200};
  const auto base = study(ctx, "burgers", "ssp54-baseline", 0.0, one);
  c.check(within_rel(e1(base, 100), 4.70e-6, 0.10),
          "ssp54-baseline E1(N=100) = " + sci(e1(base, 100)) + ", want 4.70e-06 +-10%");
  const auto g1 = study(ctx, "burgers", "ssp54-gmc", 1.0, one);
  c.check(within_rel(e1(g1, 100), 4.81e-6, 0.10), "ssp54-gmc gamma=1 E1(N=100) = " + sci(e1(g1, 100)) + ", want 4.81e-06 +-10%");
  const auto g0 = study(ctx, "burgers", "ssp54-gmc", 0.0, kTableMeshes);
  const double r0 = at(g0, 800).eoc;
  c.check(r0 >= 2.6 && r0 <= 3.0, "ssp54-gmc gamma=0 EOC(N=800) = " + rate(r0) + ", want [2.6, 3.0]");
  const auto e1g = study(ctx, "burgers", "exe-rk5-gmc", 1.0, kTableMeshes);
  const auto e2g = study(ctx, "burgers", "exe-rk5-gmc", 2.0, kTableMeshes);
  c.check(at(e2g, 800).eoc >= 4.1, "exe-rk5-gmc gamma=2 EOC(N=800) = " + rate(at(e2g, 800).eoc) + ", want >= 4.1");
  c.check(at(e1g, 800).eoc < 4.1, "exe-rk5-gmc gamma=1 EOC(N=800) = " + rate(at(e1g, 800).eoc) + ", want < 4.1");
  for (const auto* rows : {&g1, &g0, &e1g, &e2g}) {
    c.check(min_delta(*rows) >= -1e-12, "GMC min delta = " + sci(min_delta(*rows)) + ", want >= -1e-12");
  }
  return c;
}

Criterion kpp(Context& ctx) {
  Criterion c("KPP rotating wave against the entropy solution");
  for (const char* scheme : {"rk76-baseline", "ssp54-gmc"}) {
    const auto rows = study(ctx, "kpp", scheme, 0.0, kKppMeshes);
    c.check(within_rel(e1(rows, 1600), 1.98e-3, 0.10),
            std::string(scheme) + " E1(N=1600) = " + sci(e1(rows, 1600)) + ", want 1.98e-03 +-10%");
    const double r = at(rows, 1600).eoc;
    c.check(r >= 0.8 && r <= 1.1, std::string(scheme) + " EOC(N=1600) = " + rate(r) + ", want [0.8, 1.1]");
    if (std::string(scheme) != "rk76-baseline") {
      c.check(min_delta(rows) >= -1e-12, std::string(scheme) + " min delta = " + sci(min_delta(rows)) + ", want >= -1e-12");
    }
  }
  for (const char* scheme : {"rk76-gmc", "sw-rk76-gmc", "exe-rk5-gmc"}) {
    const auto rows = study(ctx, "kpp", scheme, 0.0, kKppMeshes);
    c.check(min_delta(rows) >= -1e-12, std::string(scheme) + " min delta = " + sci(min_delta(rows)) + ", want >= -1e-12");
  }
  RunConfig lin;
  lin.problem = "kpp";
  lin.scheme = "rk76-baseline";
  lin.n = 1600;
  lin.recon = Reconstruction::Linear5;
  lin.reference_dir = ctx.reference_dir;
  const auto rl = execute(lin).report;
  ctx.mass_drifts.emplace_back("kpp/rk76-baseline/linear5/N1600", rl.mass_drift());
  const double el = rl.e1.value_or(NAN);
  c.check(el >= 1.0e-2, "linear5 rk76-baseline E1(N=1600) = " + sci(el) + ", want >= 1.0e-02");
  return c;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

Criterion properties(Context& ctx) {
  Criterion c("property suites");
  std::mt19937_64 rng(2024);

  {
    // KPP's constant wave-speed bound only holds on its invariant domain [0, 1]
    std::uniform_real_distribution<double> U(-2.0, 2.0), unit(0.0, 1.0);
    const std::vector<Flux> fluxes{{FluxKind::LinearAdvection, 1.0}, {FluxKind::Burgers}, {FluxKind::KPP}};
    int bad = 0;
    for (int k = 0; k < 10000; ++k) {
      const Flux& f = fluxes[k % fluxes.size()];
      auto& dist = f.kind == FluxKind::KPP ? unit : U;
      const double a = dist(rng), b = dist(rng);
      const double lambda = wave_speed_bound(f, a, b, a, b);
      const double ub = bar_state_low(a, b, lambda, f);
      if (ub < std::min(a, b) - 1e-14 || ub > std::max(a, b) + 1e-14) ++bad;
    }
    c.check(bad == 0, "bar states within neighbor range on 10^4 random states (" + std::to_string(bad) + " violations)");
  }

  {
    std::uniform_real_distribution<double> F(-1.0, 1.0), Q(0.0, 1.0);
    int bad = 0;
    for (int k = 0; k < 1000; ++k) {
      const std::size_t n = 2 + static_cast<std::size_t>(k % 15);
      std::vector<double> f(n);
      BoundsPair q{std::vector<double>(n), std::vector<double>(n)};
      for (std::size_t i = 0; i < n; ++i) {
        f[i] = F(rng);
        q.qplus[i] = Q(rng);
        q.qminus[i] = -Q(rng);
      }
      const auto a = zalesak_factors(f, q).alpha;
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t l = i == 0 ? n - 1 : i - 1;
        const double s = a[i] * f[i] - a[l] * f[l];
        if (s > q.qplus[i] + 1e-12 || s < q.qminus[i] - 1e-12 || a[i] < 0.0 || a[i] > 1.0) ++bad;
      }
    }
    c.check(bad == 0, "Zalesak limited sums within [Q-, Q+] on 10^3 random configurations (" + std::to_string(bad) +
                          " violations)");
  }

  {
    double worst = 0.0;
    std::string where;
    for (const auto& [name, drift] : ctx.mass_drifts) {
      if (drift >= worst) {
        worst = drift;
        where = name;
      }
    }
    c.check(!ctx.mass_drifts.empty() && worst <= 1e-12, "relative mass drift over " +
                                                            std::to_string(ctx.mass_drifts.size()) +
                                                            " benchmark runs: max " + sci(worst) + " (" + where +
                                                            "), want <= 1e-12");
  }

  const auto p = advection_nonsmooth();
  const auto g = make_grid(200, p.domain);
  SemiDiscreteOperator op(g, p, Reconstruction::WENO5, {LimiterKind::None});
  const auto u0 = initial_cell_averages(p, g);
  const double dt = 0.4 * g.dx;

  {
    const auto faces = op.faces(u0, u0);
    const auto bounds = cell_bounds(u0, BoundsMode::GlobalInitialData, p);
    const LimiterConfig gmc{LimiterKind::GMC, 0.5, BoundsMode::GlobalInitialData};
    const auto a1 = space_time_factors(u0, 1.0, faces.lf_high, faces, gmc, dt, g, bounds).alpha;
    const auto a2 = space_time_factors(u0, 1.0, faces.lf_high, faces, gmc, 0.37 * dt, g, bounds).alpha;
    c.check(a1 == a2, "GMC correction factors bitwise independent of dt");
  }

  {
    SemiDiscreteOperator smooth_op(make_grid(100, {0.0, 1.0}), advection_smooth(), Reconstruction::WENO5,
                                   {LimiterKind::None});
    const auto us = initial_cell_averages(advection_smooth(), smooth_op.grid());
    const double h = 0.4 * smooth_op.grid().dx;
    const auto butcher = exe_rk5_step(us, h, smooth_op);
    const auto an = aitken_neville_update(exe_rk5_stages(us, h, smooth_op), h, smooth_op.grid().dx);
    const double d = max_abs_diff(butcher, an);
    c.check(d <= 1e-12, "ExE-RK5 Butcher vs Aitken-Neville update: max diff " + sci(d) + ", want <= 1e-12");
  }

  {
    const auto tab = ssp54_tableau();
    auto u = u0;
    double worst = 0.0;
    for (int step = 0; step < 50; ++step) {
      const auto a = ssp54_step(u, dt, op);
      worst = std::max(worst, max_abs_diff(a, generic_erk_step(tab, u, dt, op)));
      u = a;
    }
    c.check(worst <= 1e-13, "SSP54 Shu-Osher vs Butcher over 50 steps: max diff " + sci(worst) + ", want <= 1e-13");
  }

  {
    const auto s = check_internal_ssp(ssp54_tableau(), 1.0);
    c.check(s.stages_ok && s.update_ok, "check_internal_ssp(ssp54, mu=1): both conditions pass");
    const auto e = check_internal_ssp(exe_rk5_tableau(), 0.01);
    c.check(e.stages_ok && !e.update_ok, "check_internal_ssp(exe-rk5, mu=0.01): stages pass, update fails");
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  Context ctx;
  CLI::App app{"bpfv acceptance run"};
  app.add_option("--reference-dir", ctx.reference_dir, "cache directory for fine-grid references");
  app.add_option("--jobs", ctx.jobs, "parallel runs per convergence study");
  CLI11_PARSE(app, argc, argv);
  if (ctx.jobs == 0) ctx.jobs = std::max(1u, std::thread::hardware_concurrency());

  int failures = 0;
  int number = 0;
  auto run = [&](Criterion (*fn)(Context&)) {
    ++number;
    try {
      const Criterion c = fn(ctx);
      c.print(number);
      if (!c.passed()) ++failures;
    } catch (const std::exception& e) {
      std::cout << "FAIL  criterion " << number << ": aborted with error: " << e.what() << "\n";
      ++failures;
    }
  };
  run(semi_discrete);
  run(linear_advection);
  run(nonsmooth_advection);
  run(burgers);
  run(kpp);
  run(properties);

  std::cout << (number - failures) << "/" << number << " criteria passed\n";
  return failures == 0 ? 0 : 1;
}
