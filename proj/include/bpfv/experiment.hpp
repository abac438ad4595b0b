#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "bpfv/diagnostics.hpp"
#include "bpfv/errors.hpp"
#include "bpfv/kpp_reference.hpp"
#include "bpfv/problem.hpp"
#include "bpfv/time_integration.hpp"

namespace bpfv {

/// Flat run configuration shared by the CLI and config files.
struct RunConfig {
  std::string problem = "advection-smooth";
  std::string scheme = "ssp54-gmc";
  std::size_t n = 100;
  std::vector<std::size_t> meshes;  // convergence studies only
  double gamma = 0.0;
  double cfl = 0.4;
  std::optional<double> tfinal;     // defaults to the problem's final time
  BoundsMode bounds = BoundsMode::GlobalInitialData;
  Reconstruction recon = Reconstruction::WENO5;
  bool slope_limit = false;
  bool sample_stages = false;
  std::optional<double> constant_ic;
  SemiDiscreteMetric metric = SemiDiscreteMetric::FluxDifference;
  std::string out = "out";
  std::string reference_dir = "reference";
  unsigned jobs = 1;

  bool operator==(const RunConfig&) const = default;
};

inline nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["problem"] = c.problem;
  j["scheme"] = c.scheme;
  j["n"] = c.n;
  j["meshes"] = c.meshes;
  j["gamma"] = c.gamma;
  j["cfl"] = c.cfl;
  j["tfinal"] = c.tfinal ? nlohmann::json(*c.tfinal) : nlohmann::json(nullptr);
  j["bounds"] = c.bounds == BoundsMode::LocalStencil ? "local" : "global";
  j["recon"] = to_string(c.recon);
  j["slope_limit"] = c.slope_limit;
  j["sample_stages"] = c.sample_stages;
  j["constant_ic"] = c.constant_ic ? nlohmann::json(*c.constant_ic) : nlohmann::json(nullptr);
  j["metric"] = to_string(c.metric);
  j["out"] = c.out;
  j["reference_dir"] = c.reference_dir;
  j["jobs"] = c.jobs;
  return j;
}

/// Reads the keys present in `j` on top of `base`. Unknown keys are rejected.
inline RunConfig run_config_from_json(const nlohmann::json& j, RunConfig base = {}) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> known{"problem", "scheme",        "n",           "meshes",
                                              "gamma",   "cfl",           "tfinal",      "bounds",
                                              "recon",   "slope_limit",   "sample_stages", "constant_ic",
                                              "metric",  "out",           "reference_dir", "jobs"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) throw ConfigError("unknown config key '" + key + "'");
  }
  RunConfig c = std::move(base);
  try {
    if (j.contains("problem")) c.problem = j.at("problem").get<std::string>();
    if (j.contains("scheme")) c.scheme = j.at("scheme").get<std::string>();
    if (j.contains("n")) c.n = j.at("n").get<std::size_t>();
    if (j.contains("meshes")) c.meshes = j.at("meshes").get<std::vector<std::size_t>>();
    if (j.contains("gamma")) c.gamma = j.at("gamma").get<double>();
    if (j.contains("cfl")) c.cfl = j.at("cfl").get<double>();
    if (j.contains("tfinal")) {
      c.tfinal = j.at("tfinal").is_null() ? std::nullopt : std::optional<double>(j.at("tfinal").get<double>());
    }
    if (j.contains("bounds")) c.bounds = bounds_mode_from_string(j.at("bounds").get<std::string>());
    if (j.contains("recon")) c.recon = reconstruction_from_string(j.at("recon").get<std::string>());
    if (j.contains("slope_limit")) c.slope_limit = j.at("slope_limit").get<bool>();
    if (j.contains("sample_stages")) c.sample_stages = j.at("sample_stages").get<bool>();
    if (j.contains("constant_ic")) {
      c.constant_ic =
          j.at("constant_ic").is_null() ? std::nullopt : std::optional<double>(j.at("constant_ic").get<double>());
    }
    if (j.contains("metric")) c.metric = semi_discrete_metric_from_string(j.at("metric").get<std::string>());
    if (j.contains("out")) c.out = j.at("out").get<std::string>();
    if (j.contains("reference_dir")) c.reference_dir = j.at("reference_dir").get<std::string>();
    if (j.contains("jobs")) c.jobs = j.at("jobs").get<unsigned>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return c;
}

inline RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return run_config_from_json(j, std::move(base));
}

/// Resolves names and checks ranges; throws ConfigError on anything inconsistent.
inline void validate(const RunConfig& c, bool study) {
  (void)problem_by_name(c.problem);
  (void)scheme_plan(c.scheme);
  if (c.n < kMinCells) throw ConfigError("n must be at least 5 (WENO5 stencil)");
  if (!(c.gamma >= 0.0) || !std::isfinite(c.gamma)) throw ConfigError("gamma must be a finite value >= 0");
  if (!(c.cfl > 0.0) || !std::isfinite(c.cfl)) throw ConfigError("cfl must be a finite value > 0");
  if (c.tfinal && !(*c.tfinal >= 0.0)) throw ConfigError("tfinal must be >= 0");
  if (c.jobs == 0) throw ConfigError("jobs must be >= 1");
  if (study) {
    if (c.meshes.size() < 2) throw ConfigError("a convergence study needs at least two mesh sizes");
    for (std::size_t k = 0; k < c.meshes.size(); ++k) {
      if (c.meshes[k] < kMinCells) throw ConfigError("mesh sizes must be at least 5");
      if (k > 0 && c.meshes[k] <= c.meshes[k - 1]) throw ConfigError("mesh sizes must increase strictly");
    }
  }
}

inline ProblemSpec resolve_problem(const RunConfig& c) {
  ProblemSpec p = problem_by_name(c.problem);
  if (c.tfinal) p.final_time = *c.tfinal;
  if (c.constant_ic) p = with_constant_ic(std::move(p), *c.constant_ic);
  return p;
}

inline SchemeConfig resolve_scheme(const RunConfig& c) {
  SchemeConfig s;
  s.scheme = c.scheme;
  s.gamma = c.gamma;
  s.bounds_mode = c.bounds;
  s.cfl_number = c.cfl;
  s.reconstruction = c.recon;
  s.slope.enabled = c.slope_limit;
  s.sample_stages = c.sample_stages;
  return s;
}

/// Exact solution (or fine-grid reference) at the problem's final time, when one exists.
/// The KPP reference is only needed once the two waves interact; it is cached
/// under `reference_dir`.
inline std::optional<ExactProfile> exact_profile(const ProblemSpec& p, const std::string& reference_dir) {
  const double t = p.final_time;
  if (p.ic == InitialCondition::Constant) {
    const double c = p.constant_value;
    return ExactProfile([c](double) { return c; });
  }
  switch (p.flux.kind) {
    case FluxKind::LinearAdvection:
      return ExactProfile([p, t](double x) { return exact_solution(p, x, t); });
    case FluxKind::Burgers:
      if (t == 0.0 || (p.ic == InitialCondition::SinePlusHalf && t < 1.0)) {
        return ExactProfile([p, t](double x) { return exact_solution(p, x, t); });
      }
      return std::nullopt;
    case FluxKind::KPP: {
      if (t < kKppInteractionTime) return ExactProfile([p, t](double x) { return exact_solution(p, x, t); });
      // Interacting waves: fall back to the cached fine-grid reference.
      const auto path = std::filesystem::path(reference_dir) / kpp_reference_filename(t);
      auto ref = std::make_shared<KppReference>(KppReference::load_or_compute(path, p, t));
      return ExactProfile([ref](double x) { return (*ref)(x); });
    }
  }
  return std::nullopt;
}

// ---- Runs and studies ---------------------------------------------------------

struct RunOutcome {
  RunConfig config;
  RunReport report;
  StateVector state;
  Grid1D grid;
  bool semi_discrete = false;
};

inline RunOutcome execute(const RunConfig& c, const std::optional<ExactProfile>& exact) {
  const ProblemSpec p = resolve_problem(c);
  const SchemeConfig s = resolve_scheme(c);
  RunOutcome out{c, {}, {}, make_grid(c.n, p.domain), false};
  if (scheme_plan(c.scheme).semi_discrete) {
    out.semi_discrete = true;
    const auto t0 = std::chrono::steady_clock::now();
    out.report.e1 = semi_discrete_error(s, p, out.grid, c.metric, &out.state);
    out.report.delta_minus = out.report.delta_plus = out.report.delta = kUndefinedEoc;
    out.report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
  }
  auto res = run_simulation(s, p, out.grid, exact ? *exact : ExactProfile{});
  out.report = res.report;
  out.state = std::move(res.state);
  return out;
}

inline RunOutcome execute(const RunConfig& c) {
  const ProblemSpec p = resolve_problem(c);
  const bool semi = scheme_plan(c.scheme).semi_discrete;
  return execute(c, semi ? std::nullopt : exact_profile(p, c.reference_dir));
}

struct ConvergenceRow {
  std::size_t n = 0;
  RunReport report;
  double eoc = kUndefinedEoc;  // undefined on the first row
};

/// Runs every mesh of c.meshes (in parallel with c.jobs workers) and attaches EOCs.
inline std::vector<ConvergenceRow> convergence_study(const RunConfig& c) {
  validate(c, true);
  const ProblemSpec p = resolve_problem(c);
  const bool semi = scheme_plan(c.scheme).semi_discrete;
  const auto exact = semi ? std::nullopt : exact_profile(p, c.reference_dir);

  std::vector<ConvergenceRow> rows(c.meshes.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < rows.size(); k = next++) {
      try {
        RunConfig ck = c;
        ck.n = c.meshes[k];
        rows[k].n = ck.n;
        rows[k].report = execute(ck, exact).report;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(c.jobs, static_cast<unsigned>(rows.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<double> errors, ns;
  for (const auto& r : rows) {
    errors.push_back(r.report.e1.value_or(kUndefinedEoc));
    ns.push_back(static_cast<double>(r.n));
  }
  const auto rates = eoc(errors, ns);
  for (std::size_t k = 1; k < rows.size(); ++k) rows[k].eoc = rates[k - 1];
  return rows;
}

// ---- Formatting -----------------------------------------------------------------

/// Scientific notation with three significant digits, e.g. 1.35e-07.
inline std::string format_sci3(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

inline std::string format_eoc(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// CSV table: N,E1,EOC,delta (EOC blank on the first row, delta blank when undefined).
inline std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
  std::string s = "N,E1,EOC,delta\n";
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    s += std::to_string(r.n) + ",";
    s += (r.report.e1 ? format_sci3(*r.report.e1) : std::string("nan")) + ",";
    s += (k == 0 ? std::string() : format_eoc(r.eoc)) + ",";
    s += (std::isnan(r.report.delta) ? std::string() : format_sci3(r.report.delta)) + "\n";
  }
  return s;
}

inline nlohmann::json json_number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

inline nlohmann::json report_json(const RunReport& r) {
  nlohmann::json j;
  j["e1"] = r.e1 ? json_number(*r.e1) : nlohmann::json(nullptr);
  j["delta_minus"] = json_number(r.delta_minus);
  j["delta_plus"] = json_number(r.delta_plus);
  j["delta"] = json_number(r.delta);
  j["mass_initial"] = r.mass_initial;
  j["mass_final"] = r.mass_final;
  j["mass_drift"] = r.mass_drift();
  j["n_steps"] = r.n_steps;
  j["dt"] = r.dt;
  j["final_time"] = r.final_time;
  j["cfl_warnings"] = r.cfl_warnings;
  j["wall_time_s"] = r.wall_time_s;
  return j;
}

inline nlohmann::json run_json(const RunOutcome& o) {
  nlohmann::json j;
  j["schema"] = "bpfv.run/1";
  j["config"] = to_json(o.config);
  j["semi_discrete"] = o.semi_discrete;
  j["report"] = report_json(o.report);
  return j;
}

inline nlohmann::json convergence_json(const RunConfig& c, const std::vector<ConvergenceRow>& rows) {
  nlohmann::json j;
  j["schema"] = "bpfv.convergence/1";
  j["config"] = to_json(c);
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json row = report_json(r.report);
    row["n"] = r.n;
    row["eoc"] = json_number(r.eoc);
    j["rows"].push_back(std::move(row));
  }
  return j;
}

/// Profile CSV: x,u and, when an exact solution is known, u_exact.
inline std::string profile_csv(const Grid1D& grid, std::span<const double> u,
                               const std::optional<ExactProfile>& exact) {
  std::string s = exact ? "x,u,u_exact\n" : "x,u\n";
  for (std::size_t i = 0; i < grid.n_cells; ++i) {
    s += format_full(grid.cell_centers[i]) + "," + format_full(u[i]);
    if (exact) s += "," + format_full((*exact)(grid.cell_centers[i]));
    s += "\n";
  }
  return s;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

}  // namespace bpfv
