#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bpfv/errors.hpp"
#include "bpfv/grid.hpp"
#include "bpfv/problem.hpp"

namespace bpfv {

inline constexpr std::size_t kKppReferenceCells = 51200;
inline constexpr double kKppReferenceCfl = 0.2;

/// Fine-grid entropy reference for the KPP problem at one time, computed with
/// the first-order LLF scheme (lambda = 1) and cached as "x,u" CSV.
class KppReference {
 public:
  KppReference() = default;
  KppReference(std::vector<double> x, std::vector<double> u, double x_left, double x_right)
      : x_(std::move(x)), u_(std::move(u)), x_left_(x_left), x_right_(x_right) {
    dx_ = (x_right_ - x_left_) / static_cast<double>(u_.size());
  }

  std::size_t size() const { return u_.size(); }
  bool empty() const { return u_.empty(); }
  const std::vector<double>& centers() const { return x_; }
  const std::vector<double>& values() const { return u_; }

  /// Periodic interpolation between neighboring fine-cell centers.
  double operator()(double x) const {
    const double L = x_right_ - x_left_;
    double s = std::fmod(x - x_left_, L);
    if (s < 0.0) s += L;
    const double pos = s / dx_ - 0.5;
    const double fl = std::floor(pos);
    const double w = pos - fl;
    const std::size_t n = u_.size();
    const auto i0 = static_cast<std::size_t>((static_cast<long long>(fl) % static_cast<long long>(n) +
                                              static_cast<long long>(n)) %
                                             static_cast<long long>(n));
    const std::size_t i1 = i0 + 1 == n ? 0 : i0 + 1;
    return (1.0 - w) * u_[i0] + w * u_[i1];
  }

  static KppReference compute(const ProblemSpec& problem, double t_final,
                              std::size_t n_cells = kKppReferenceCells, double cfl = kKppReferenceCfl) {
    const Grid1D grid = make_grid(n_cells, problem.domain);
    std::vector<double> u = initial_cell_averages(problem, grid);
    std::vector<double> f(n_cells), h(n_cells);
    const double dt_nominal = cfl * grid.dx;
    const auto n_steps = static_cast<std::size_t>(std::ceil(t_final / dt_nominal - 1e-12));
    for (std::size_t step = 0; step < n_steps; ++step) {
      const double dt = step + 1 == n_steps ? t_final - static_cast<double>(step) * dt_nominal : dt_nominal;
      const double r = dt / grid.dx;
      for (std::size_t i = 0; i < n_cells; ++i) f[i] = problem.flux(u[i]);
      for (std::size_t k = 0; k + 1 < n_cells; ++k) h[k] = 0.5 * (f[k] + f[k + 1]) - 0.5 * (u[k + 1] - u[k]);
      h[n_cells - 1] = 0.5 * (f[n_cells - 1] + f[0]) - 0.5 * (u[0] - u[n_cells - 1]);
      double prev = h[n_cells - 1];
      for (std::size_t i = 0; i < n_cells; ++i) {
        const double hi = h[i];
        u[i] -= r * (hi - prev);
        prev = hi;
      }
    }
    return KppReference(grid.cell_centers, std::move(u), grid.x_left, grid.x_right);
  }

  void save(const std::filesystem::path& path) const {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write KPP reference cache " + path.string());
    out << "x,u\n";
    char buf[96];
    for (std::size_t i = 0; i < u_.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", x_[i], u_[i]);
      out << buf;
    }
  }

  /// Returns an empty reference when the file is missing or malformed.
  static KppReference load(const std::filesystem::path& path, std::pair<double, double> domain,
                           std::size_t expected_cells = kKppReferenceCells) {
    std::ifstream in(path);
    if (!in) return {};
    std::string line;
    if (!std::getline(in, line) || line != "x,u") return {};
    std::vector<double> x, u;
    x.reserve(expected_cells);
    u.reserve(expected_cells);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) return {};
      try {
        x.push_back(std::stod(line.substr(0, comma)));
        u.push_back(std::stod(line.substr(comma + 1)));
      } catch (const std::exception&) {
        return {};
      }
    }
    if (u.size() != expected_cells) return {};
    return KppReference(std::move(x), std::move(u), domain.first, domain.second);
  }

  static KppReference load_or_compute(const std::filesystem::path& path, const ProblemSpec& problem,
                                      double t_final) {
    auto ref = load(path, problem.domain);
    if (!ref.empty()) return ref;
    ref = compute(problem, t_final);
    ref.save(path);
    return ref;
  }

 private:
  std::vector<double> x_;
  std::vector<double> u_;
  double x_left_ = 0.0;
  double x_right_ = 1.0;
  double dx_ = 1.0;
};

/// Default cache file name, keyed by resolution and time.
inline std::string kpp_reference_filename(double t_final) {
  std::ostringstream os;
  os << "kpp_reference_N" << kKppReferenceCells << "_T" << t_final << ".csv";
  return os.str();
}

}  // namespace bpfv
