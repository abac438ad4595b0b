#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "bpfv/errors.hpp"

namespace bpfv {

/// Explicit Runge-Kutta method in Butcher form; a is stored row-major M x M.
struct ButcherTableau {
  std::string name;
  std::size_t stages = 0;
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> c;

  double operator()(std::size_t m, std::size_t s) const { return a[m * stages + s]; }
  double& at(std::size_t m, std::size_t s) { return a[m * stages + s]; }

  /// Throws ConfigError unless a is strictly lower triangular with consistent
  /// sizes; row sums and sum(b) are checked against `tol`.
  void validate(double tol = 1e-12) const {
    if (stages == 0 || a.size() != stages * stages || b.size() != stages || c.size() != stages) {
      throw ConfigError("tableau '" + name + "' has inconsistent dimensions");
    }
    for (std::size_t m = 0; m < stages; ++m) {
      for (std::size_t s = m; s < stages; ++s) {
        if ((*this)(m, s) != 0.0) throw ConfigError("tableau '" + name + "' is not explicit");
      }
      double row = 0.0;
      for (std::size_t s = 0; s < m; ++s) row += (*this)(m, s);
      if (std::abs(row - c[m]) > tol) throw ConfigError("tableau '" + name + "': c_m != sum_s a_ms");
    }
    double sb = 0.0;
    for (double v : b) sb += v;
    if (std::abs(sb - 1.0) > tol) throw ConfigError("tableau '" + name + "': weights do not sum to 1");
  }
};

inline ButcherTableau make_tableau(std::string name, const std::vector<std::vector<double>>& rows,
                                   std::vector<double> b) {
  ButcherTableau t;
  t.name = std::move(name);
  t.stages = b.size();
  t.a.assign(t.stages * t.stages, 0.0);
  t.c.assign(t.stages, 0.0);
  for (std::size_t m = 0; m < rows.size() && m < t.stages; ++m) {
    for (std::size_t s = 0; s < rows[m].size(); ++s) {
      t.at(m, s) = rows[m][s];
      t.c[m] += rows[m][s];
    }
  }
  t.b = std::move(b);
  return t;
}

inline ButcherTableau forward_euler_tableau() { return make_tableau("euler", {{}}, {1.0}); }

/// Shu-Osher coefficients of the five-stage, fourth-order SSP method:
/// y1 = u + b10 dt F(u);  y_k = a_k0 u + a_k y_{k-1} + b_k dt F(y_{k-1}) for k = 2..4;
/// u^{n+1} = a52 y2 + a53 y3 + b53 dt F(y3) + a54 y4 + b54 dt F(y4).
struct Ssp54Coefficients {
  static constexpr double b10 = 0.391752226571890;
  static constexpr double a20 = 0.444370493651235, a21 = 0.555629506348765, b21 = 0.368410593050371;
  static constexpr double a30 = 0.620101851488403, a32 = 0.379898148511597, b32 = 0.251891774271694;
  static constexpr double a40 = 0.178079954393132, a43 = 0.821920045606868, b43 = 0.544974750228521;
  static constexpr double a52 = 0.517231671970585, a53 = 0.096059710526147, b53 = 0.063692468666290;
  static constexpr double a54 = 0.386708617503269, b54 = 0.226007483236906;
};

/// Butcher form of the Shu-Osher SSP54 stages. Used for cross-checks and SSP audits.
inline ButcherTableau ssp54_tableau() {
  using C = Ssp54Coefficients;
  // Each Shu-Osher value written as u + dt * sum_j w_j F(Y_j) with Y = (u, y1, y2, y3, y4).
  using Row = std::array<double, 5>;
  auto combine = [](std::initializer_list<std::pair<double, Row>> terms) {
    Row r{};
    for (const auto& [w, row] : terms) {
      for (std::size_t j = 0; j < 5; ++j) r[j] += w * row[j];
    }
    return r;
  };
  const Row zero{};
  const Row y1{C::b10, 0, 0, 0, 0};
  Row y2 = combine({{C::a20, zero}, {C::a21, y1}});
  y2[1] += C::b21;
  Row y3 = combine({{C::a30, zero}, {C::a32, y2}});
  y3[2] += C::b32;
  Row y4 = combine({{C::a40, zero}, {C::a43, y3}});
  y4[3] += C::b43;
  Row y5 = combine({{C::a52, y2}, {C::a53, y3}, {C::a54, y4}});
  y5[3] += C::b53;
  y5[4] += C::b54;

  std::vector<std::vector<double>> rows{{}, {y1[0]}, {y2[0], y2[1]}, {y3[0], y3[1], y3[2]},
                                        {y4[0], y4[1], y4[2], y4[3]}};
  return make_tableau("ssp54", rows, {y5.begin(), y5.end()});
}

/// Extrapolation weights for S = 2..5 sequential-Euler chains.
inline std::vector<double> extrapolation_weights(int order) {
  switch (order) {
    case 2: return {0.0, 1.0};
    case 3: return {0.0, -2.0, 1.5, 1.5};
    case 4: return {0.0, 2.0, -4.5, -4.5, 8.0 / 3.0, 8.0 / 3.0, 8.0 / 3.0};
    case 5:
      return {0.0,          -4.0 / 3.0,   27.0 / 4.0,   27.0 / 4.0,   -32.0 / 3.0, -32.0 / 3.0,
              -32.0 / 3.0,  125.0 / 24.0, 125.0 / 24.0, 125.0 / 24.0, 125.0 / 24.0};
    default:
      throw ConfigError("extrapolated Euler is tabulated for orders 2..5 only");
  }
}

/// Euler extrapolation in Butcher form: for s = 2..order, a chain of s-1 Euler
/// sub-steps of size dt/s starting from u^n.
inline ButcherTableau extrapolated_euler_tableau(int order) {
  std::vector<std::vector<double>> rows{{}};
  for (int s = 2; s <= order; ++s) {
    std::vector<double> row(rows.size(), 0.0);
    row[0] = 1.0 / s;
    rows.push_back(row);
    for (int k = 2; k < s; ++k) {
      std::vector<double> next = rows.back();
      next.resize(rows.size(), 0.0);
      next[rows.size() - 1] = 1.0 / s;
      rows.push_back(next);
    }
  }
  return make_tableau(order == 5 ? "exe-rk5" : "exe-rk" + std::to_string(order), rows,
                      extrapolation_weights(order));
}

inline ButcherTableau exe_rk5_tableau() { return extrapolated_euler_tableau(5); }

/// Seven-stage sixth-order explicit RK method.
inline ButcherTableau rk76_tableau() {
  return make_tableau("rk76",
                      {{},
                       {1.0 / 3.0},
                       {0.0, 2.0 / 3.0},
                       {1.0 / 12.0, 1.0 / 3.0, -1.0 / 12.0},
                       {-1.0 / 16.0, 9.0 / 8.0, -3.0 / 16.0, -3.0 / 8.0},
                       {0.0, 9.0 / 8.0, -3.0 / 8.0, -3.0 / 4.0, 1.0 / 2.0},
                       {9.0 / 44.0, -9.0 / 11.0, 63.0 / 44.0, 18.0 / 11.0, 0.0, -16.0 / 11.0}},
                      {11.0 / 120.0, 0.0, 27.0 / 40.0, 27.0 / 40.0, -4.0 / 15.0, -4.0 / 15.0, 11.0 / 120.0});
}

inline std::vector<std::string> tableau_names() { return {"euler", "ssp54", "exe-rk5", "rk76"}; }

inline ButcherTableau tableau_by_name(const std::string& name) {
  if (name == "euler") return forward_euler_tableau();
  if (name == "ssp54") return ssp54_tableau();
  if (name == "exe-rk5") return exe_rk5_tableau();
  if (name == "rk76") return rk76_tableau();
  throw ConfigError("unknown tableau '" + name + "'");
}

struct SspViolation {
  std::string condition;  // "AX>=0", "AXe<=e", "bX>=0", "bXe<=1"
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;
};

struct SspReport {
  bool stages_ok = true;
  bool update_ok = true;
  std::vector<SspViolation> violations;
};

/// Entrywise internal-SSP conditions with X = (I + mu A)^{-1}:
/// stages AX >= 0, AXe <= e; update b^T X >= 0, b^T X e <= 1.
inline SspReport check_internal_ssp(const ButcherTableau& t, double mu, double tol = 1e-14) {
  const auto m = static_cast<Eigen::Index>(t.stages);
  Eigen::MatrixXd A(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) A(i, j) = t(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  }
  const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(t.b.data(), m);
  const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(m, m) + mu * A;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  if (!lu.isInvertible()) throw NumericalError("I + mu A is singular for tableau '" + t.name + "'");
  const Eigen::MatrixXd X = lu.inverse();
  const Eigen::MatrixXd AX = A * X;
  const Eigen::VectorXd AXe = AX.rowwise().sum();
  const Eigen::RowVectorXd bX = b.transpose() * X;
  const double bXe = bX.sum();

  SspReport r;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (AX(i, j) < -tol) {
        r.stages_ok = false;
        r.violations.push_back({"AX>=0", std::size_t(i), std::size_t(j), AX(i, j)});
      }
    }
    if (AXe(i) > 1.0 + tol) {
      r.stages_ok = false;
      r.violations.push_back({"AXe<=e", std::size_t(i), 0, AXe(i)});
    }
    if (bX(i) < -tol) {
      r.update_ok = false;
      r.violations.push_back({"bX>=0", 0, std::size_t(i), bX(i)});
    }
  }
  if (bXe > 1.0 + tol) {
    r.update_ok = false;
    r.violations.push_back({"bXe<=1", 0, 0, bXe});
  }
  return r;
}

}  // namespace bpfv
