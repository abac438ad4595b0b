// Command-line front end: run | convergence | ssp-check | plot-data.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bpfv/experiment.hpp"
#include "bpfv/tableau.hpp"

namespace {

using namespace bpfv;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

// Flag values; only the ones given on the command line override the config.
struct Flags {
  std::string config;
  std::string problem, scheme, bounds, recon, out, metric, reference_dir;
  std::size_t n = 0;
  std::vector<std::size_t> meshes;
  double gamma = 0.0, cfl = 0.0, tfinal = 0.0, constant_ic = 0.0;
  unsigned jobs = 1;
  bool slope_limit = false, sample_stages = false;
};

struct Options {
  CLI::Option* problem = nullptr;
  CLI::Option* scheme = nullptr;
  CLI::Option* n = nullptr;
  CLI::Option* meshes = nullptr;
  CLI::Option* gamma = nullptr;
  CLI::Option* cfl = nullptr;
  CLI::Option* tfinal = nullptr;
  CLI::Option* bounds = nullptr;
  CLI::Option* recon = nullptr;
  CLI::Option* out = nullptr;
  CLI::Option* jobs = nullptr;
  CLI::Option* metric = nullptr;
  CLI::Option* reference_dir = nullptr;
  CLI::Option* constant_ic = nullptr;
  CLI::Option* slope_limit = nullptr;
  CLI::Option* sample_stages = nullptr;
};

Options add_run_flags(CLI::App* app, Flags& f, bool study) {
  Options o;
  app->add_option("--config", f.config, "JSON config file (flags override its values)");
  o.problem = app->add_option("--problem", f.problem, "advection-smooth|advection-nonsmooth|burgers|burgers-gaussian|kpp");
  o.scheme = app->add_option("--scheme", f.scheme, "scheme preset, e.g. ssp54-gmc, rk76-baseline, llf");
  o.n = app->add_option("--n", f.n, "number of cells");
  if (study) o.meshes = app->add_option("--meshes", f.meshes, "mesh sizes, e.g. --meshes 25 50 100")->delimiter(',');
  o.gamma = app->add_option("--gamma", f.gamma, "GMC/LMC bound relaxation parameter");
  o.cfl = app->add_option("--cfl", f.cfl, "time step dt = cfl * dx / (1 + gamma)");
  o.tfinal = app->add_option("--tfinal", f.tfinal, "final time (defaults to the problem's)");
  o.bounds = app->add_option("--bounds", f.bounds, "global|local");
  o.recon = app->add_option("--recon", f.recon, "weno5|linear5");
  o.out = app->add_option("--out", f.out, "output directory");
  o.jobs = app->add_option("--jobs", f.jobs, "parallel runs in a convergence study");
  o.metric = app->add_option("--metric", f.metric, "semi-discrete error: flux-difference|time-derivative");
  o.reference_dir = app->add_option("--reference-dir", f.reference_dir, "cache directory for reference solutions");
  o.constant_ic = app->add_option("--constant-ic", f.constant_ic, "replace the initial data by a constant");
  o.slope_limit = app->add_flag("--slope-limit", f.slope_limit, "enable bound-preserving slope limiting");
  o.sample_stages = app->add_flag("--sample-stages", f.sample_stages, "also sample delta at limited stages");
  return o;
}

RunConfig build_config(const Flags& f, const Options& o) {
  RunConfig c;
  if (!f.config.empty()) c = load_run_config(f.config);
  auto given = [](CLI::Option* opt) { return opt != nullptr && opt->count() > 0; };
  if (given(o.problem)) c.problem = f.problem;
  if (given(o.scheme)) c.scheme = f.scheme;
  if (given(o.n)) c.n = f.n;
  if (given(o.meshes)) c.meshes = f.meshes;
  if (given(o.gamma)) c.gamma = f.gamma;
  if (given(o.cfl)) c.cfl = f.cfl;
  if (given(o.tfinal)) c.tfinal = f.tfinal;
  if (given(o.bounds)) c.bounds = bounds_mode_from_string(f.bounds);
  if (given(o.recon)) c.recon = reconstruction_from_string(f.recon);
  if (given(o.out)) c.out = f.out;
  if (given(o.jobs)) c.jobs = f.jobs;
  if (given(o.metric)) c.metric = semi_discrete_metric_from_string(f.metric);
  if (given(o.reference_dir)) c.reference_dir = f.reference_dir;
  if (given(o.constant_ic)) c.constant_ic = f.constant_ic;
  if (given(o.slope_limit)) c.slope_limit = f.slope_limit;
  if (given(o.sample_stages)) c.sample_stages = f.sample_stages;
  return c;
}

std::string run_tag(const RunConfig& c) { return c.problem + "_" + c.scheme + "_N" + std::to_string(c.n); }

void print_summary(const RunOutcome& o) {
  const auto& r = o.report;
  std::printf("%s %s N=%zu gamma=%g\n", o.config.problem.c_str(), o.config.scheme.c_str(), o.config.n,
              o.config.gamma);
  std::printf("  E1          %s\n", r.e1 ? format_sci3(*r.e1).c_str() : "n/a");
  if (!o.semi_discrete) {
    std::printf("  delta       %s (delta- %s, delta+ %s)\n", format_sci3(r.delta).c_str(),
                format_sci3(r.delta_minus).c_str(), format_sci3(r.delta_plus).c_str());
    std::printf("  mass drift  %s\n", format_sci3(r.mass_drift()).c_str());
    std::printf("  steps       %zu (dt %s)\n", r.n_steps, format_sci3(r.dt).c_str());
  }
  std::printf("  wall time   %.3f s\n", r.wall_time_s);
}

int cmd_run(const RunConfig& c) {
  validate(c, false);
  const auto outcome = execute(c);
  const fs::path dir(c.out);
  const std::string tag = run_tag(c);
  write_text(dir / (tag + "_report.json"), run_json(outcome).dump(2) + "\n");
  if (!outcome.semi_discrete) write_text(dir / (tag + "_profile.csv"), profile_csv(outcome.grid, outcome.state, {}));
  print_summary(outcome);
  return kExitOk;
}

int cmd_plot_data(const RunConfig& c) {
  validate(c, false);
  if (scheme_plan(c.scheme).semi_discrete) throw ConfigError("plot-data needs a time-dependent scheme");
  const ProblemSpec p = resolve_problem(c);
  const auto exact = exact_profile(p, c.reference_dir);
  const auto outcome = execute(c, exact);
  const fs::path path = fs::path(c.out) / (run_tag(c) + "_plot.csv");
  write_text(path, profile_csv(outcome.grid, outcome.state, exact));
  std::printf("wrote %s (%zu rows%s)\n", path.string().c_str(), outcome.grid.n_cells,
              exact ? ", with u_exact" : ", numerical only");
  return kExitOk;
}

int cmd_convergence(const RunConfig& c) {
  const auto rows = convergence_study(c);
  const fs::path dir(c.out);
  const std::string tag = c.problem + "_" + c.scheme + "_g" + format_eoc(c.gamma);
  const std::string csv = convergence_csv(rows);
  write_text(dir / (tag + "_convergence.csv"), csv);
  write_text(dir / (tag + "_convergence.json"), convergence_json(c, rows).dump(2) + "\n");
  std::fputs(csv.c_str(), stdout);
  return kExitOk;
}

ButcherTableau load_tableau(const std::string& spec) {
  const auto names = tableau_names();
  if (std::find(names.begin(), names.end(), spec) != names.end()) return tableau_by_name(spec);
  if (!fs::exists(spec)) throw ConfigError("unknown tableau '" + spec + "' (not a preset or a file)");
  std::ifstream in(spec);
  nlohmann::json j;
  try {
    in >> j;
    const auto rows = j.at("a").get<std::vector<std::vector<double>>>();
    auto b = j.at("b").get<std::vector<double>>();
    auto t = make_tableau(j.value("name", fs::path(spec).stem().string()), rows, std::move(b));
    t.validate(1e-12);
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("tableau file " + spec + ": " + e.what());
  }
}

int cmd_ssp_check(const std::string& spec, double mu) {
  if (!(mu > 0.0)) throw ConfigError("mu must be positive");
  const auto t = load_tableau(spec);
  const auto r = check_internal_ssp(t, mu);
  std::printf("tableau %s (%zu stages), mu = %g\n", t.name.c_str(), t.stages, mu);
  std::printf("  stages_ok  %s\n", r.stages_ok ? "true" : "false");
  std::printf("  update_ok  %s\n", r.update_ok ? "true" : "false");
  for (const auto& v : r.violations) {
    std::printf("  violation %-7s row %zu col %zu value %.6e\n", v.condition.c_str(), v.row, v.col, v.value);
  }
  return r.stages_ok && r.update_ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bound-preserving WENO finite volume solver for 1D scalar conservation laws"};
  app.require_subcommand(1);

  Flags run_flags, study_flags, plot_flags;
  auto* run = app.add_subcommand("run", "single run; writes a JSON report and the final profile");
  const Options run_opts = add_run_flags(run, run_flags, false);
  auto* study = app.add_subcommand("convergence", "grid convergence study; writes a CSV table");
  const Options study_opts = add_run_flags(study, study_flags, true);
  auto* plot = app.add_subcommand("plot-data", "final profile with the exact solution when known");
  const Options plot_opts = add_run_flags(plot, plot_flags, false);

  std::string tableau;
  double mu = 1.0;
  auto* ssp = app.add_subcommand("ssp-check", "internal SSP conditions of a Butcher tableau");
  ssp->add_option("tableau", tableau, "preset (euler|ssp54|exe-rk5|rk76) or JSON file {a, b}")->required();
  ssp->add_option("--mu", mu, "stability parameter mu > 0");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) return cmd_run(build_config(run_flags, run_opts));
    if (*study) return cmd_convergence(build_config(study_flags, study_opts));
    if (*plot) return cmd_plot_data(build_config(plot_flags, plot_opts));
    if (*ssp) return cmd_ssp_check(tableau, mu);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
