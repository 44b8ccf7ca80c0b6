#pragma once

#include <cmath>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "difflog/common.hpp"
#include "difflog/params.hpp"
#include "difflog/spline.hpp"

namespace difflog {

/// Numerical solution I(x, t) on a uniform spatial grid, recorded at whole
/// hours t = 1..t_end. Immutable once returned by solve().
struct SolutionGrid {
  double x0 = 0.0;   // leftmost node = l
  double dx = 0.0;   // grid spacing
  std::size_t nodes = 0;
  int t_end = 1;                           // hours run from 1 to t_end inclusive
  std::vector<std::vector<double>> rows;   // rows[h - 1][i] = I(x0 + i*dx, h)
  DLParams params;                         // provenance
  double dt = 0.0;                         // effective step actually used
  std::string scheme = "crank-nicolson-diffusion+midpoint-reaction";

  double x_at(std::size_t i) const { return x0 + static_cast<double>(i) * dx; }

  std::size_t nearest_node(double x) const {
    auto i = static_cast<long long>(std::llround((x - x0) / dx));
    if (i < 0) i = 0;
    if (i >= static_cast<long long>(nodes)) i = static_cast<long long>(nodes) - 1;
    return static_cast<std::size_t>(i);
  }

  const std::vector<double>& at_hour(int t) const {
    if (t < 1 || t > t_end)
      throw input_error("solution requested at t = " + std::to_string(t) + ", valid range [1, " +
                        std::to_string(t_end) + "]");
    return rows[static_cast<std::size_t>(t - 1)];
  }
};

namespace detail {

/// One IMEX step from time t to t + dt:
/// reaction handled explicitly with a midpoint predictor, diffusion with
/// Crank-Nicolson and ghost-point Neumann closure (I[-1] = I[1], I[N+1] = I[N-1]).
/// work vectors are scratch to avoid reallocation in the hot loop.
struct CnWorkspace {
  std::vector<double> rhs, cp, dp, predicted;
};

inline void cn_imex_step(std::vector<double>& u, double t, double dt, const DLParams& p, double dx,
                         CnWorkspace& w) {
  const std::size_t n = u.size();
  const double lam = p.d * dt / (2.0 * dx * dx);
  const double r_now = p.r.at(t);
  const double r_half = p.r.at(t + 0.5 * dt);

  w.rhs.resize(n);
  w.cp.resize(n);
  w.dp.resize(n);
  w.predicted.resize(n);

  // midpoint predictor for the nonlinear reaction, then the reaction flux at t + dt/2
  for (std::size_t i = 0; i < n; ++i) {
    double v = u[i];
    double star = v + 0.5 * dt * r_now * v * (1.0 - v / p.K);
    w.predicted[i] = r_half * star * (1.0 - star / p.K);
  }

  // rhs = (Id + lam*D2) u + dt * reaction
  w.rhs[0] = u[0] + 2.0 * lam * (u[1] - u[0]) + dt * w.predicted[0];
  for (std::size_t i = 1; i + 1 < n; ++i)
    w.rhs[i] = u[i] + lam * (u[i + 1] - 2.0 * u[i] + u[i - 1]) + dt * w.predicted[i];
  w.rhs[n - 1] = u[n - 1] + 2.0 * lam * (u[n - 2] - u[n - 1]) + dt * w.predicted[n - 1];

  // Thomas solve of (Id - lam*D2) u_next = rhs; boundary rows carry 2*lam
  const double diag = 1.0 + 2.0 * lam;
  w.cp[0] = -2.0 * lam / diag;
  w.dp[0] = w.rhs[0] / diag;
  for (std::size_t i = 1; i < n; ++i) {
    double low = (i + 1 == n) ? -2.0 * lam : -lam;
    double up = -lam;
    double m = diag - low * w.cp[i - 1];
    w.cp[i] = up / m;
    w.dp[i] = (w.rhs[i] - low * w.dp[i - 1]) / m;
  }
  u[n - 1] = w.dp[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) u[i] = w.dp[i] - w.cp[i] * u[i + 1];
}

}  // namespace detail

/// Advances the diffusive logistic equation from t = 1 on the given initial
/// grid values. Grid and params must already be consistent; the public
/// overload taking an InitialDensity handles sampling and validation.
inline SolutionGrid solve_on_grid(const DLParams& params, std::vector<double> initial, int t_end,
                                  double dx, double dt) {
  params.validate();
  if (!(dt > 0.0)) throw input_error("solve: dt must be > 0");
  if (t_end <= 1) throw input_error("solve: t_end must exceed the initial time t = 1");
  const std::size_t n = initial.size();
  if (n < 9) throw input_error("solve: dx must divide the domain into at least 8 intervals");

  // snap dt to a whole number of steps per hour so outputs land exactly on hours
  const auto steps_per_hour = static_cast<std::size_t>(std::max(1.0, std::round(1.0 / dt)));
  const double dt_eff = 1.0 / static_cast<double>(steps_per_hour);

  SolutionGrid grid;
  grid.x0 = params.l;
  grid.dx = dx;
  grid.nodes = n;
  grid.t_end = t_end;
  grid.params = params;
  grid.dt = dt_eff;
  grid.rows.reserve(static_cast<std::size_t>(t_end));
  grid.rows.push_back(initial);

  const double undershoot_floor = -1e-9 * params.K;
  const double blow_high = params.K * (1.0 + 1e-6);

  detail::CnWorkspace w;
  std::vector<double>& u = initial;
  std::size_t step = 0;
  for (int hour = 1; hour < t_end; ++hour) {
    for (std::size_t k = 0; k < steps_per_hour; ++k, ++step) {
      double t = static_cast<double>(hour) + static_cast<double>(k) * dt_eff;
      detail::cn_imex_step(u, t, dt_eff, params, dx, w);
      for (std::size_t i = 0; i < n; ++i) {
        double v = u[i];
        if (std::isnan(v) || v > blow_high || v < undershoot_floor)
          throw solver_error("instability at step " + std::to_string(step + 1) + " (t = " +
                             format_double(t + dt_eff) + ", x = " + format_double(grid.x_at(i)) +
                             ", value = " + format_double(v) + "); reduce dt");
        if (v < 0.0) u[i] = 0.0;  // roundoff-level undershoot only; worse aborts above
      }
    }
    grid.rows.push_back(u);
  }
  return grid;
}

/// Solves with the initial profile phi sampled on a uniform grid over
/// [params.l, params.L]; dx must evenly divide the domain into >= 8 intervals
/// and phi must cover it (no extrapolation).
inline SolutionGrid solve(const DLParams& params, const InitialDensity& phi, int t_end, double dx,
                          double dt) {
  params.validate();
  if (!(dx > 0.0)) throw input_error("solve: dx must be > 0");
  const double span = params.L - params.l;
  const double intervals = span / dx;
  const auto n_int = static_cast<std::size_t>(std::llround(intervals));
  if (n_int < 8) throw input_error("solve: dx must divide the domain into at least 8 intervals");
  if (std::abs(intervals - static_cast<double>(n_int)) > 1e-9 * intervals)
    throw input_error("solve: dx must evenly divide the domain [l, L]");
  if (phi.domain_left() > params.l + 1e-12 || phi.domain_right() < params.L - 1e-12)
    throw input_error("solve: initial density does not cover [l, L]");

  std::vector<double> initial(n_int + 1);
  for (std::size_t i = 0; i <= n_int; ++i) {
    double x = params.l + static_cast<double>(i) * dx;
    initial[i] = phi.evaluate(std::min(x, phi.domain_right()));
  }
  return solve_on_grid(params, std::move(initial), t_end, dx, dt);
}

/// Density at the grid node nearest to an integer distance, at a whole hour.
inline double predict_at(const SolutionGrid& solution, int x, int t) {
  double xd = static_cast<double>(x);
  double right = solution.x_at(solution.nodes - 1);
  if (xd < solution.x0 - 1e-9 || xd > right + 1e-9)
    throw input_error("predict_at: x = " + std::to_string(x) + " outside [" +
                      format_double(solution.x0) + ", " + format_double(right) + "]");
  return solution.at_hour(t)[solution.nearest_node(xd)];
}

// ---------------------------------------------------------------------------
// Property verification: bounds, temporal monotonicity, boundary flux
// ---------------------------------------------------------------------------

struct PropertyReport {
  bool bounds_ok = false;
  double min_value = 0.0;
  double max_value = 0.0;
  bool monotone_ok = false;
  bool monotone_expected = false;  // only when phi passed the lower-solution check
  double max_decrease = 0.0;       // largest drop I[x][t] - I[x][t+1] observed
  bool boundary_flux_ok = false;
  double max_boundary_flux = 0.0;
  double flux_tolerance = 0.0;

  bool all_passed() const {
    return bounds_ok && boundary_flux_ok && (monotone_ok || !monotone_expected);
  }

  nlohmann::json to_json() const {
    return nlohmann::json{{"bounds_ok", bounds_ok},
                          {"min_value", min_value},
                          {"max_value", max_value},
                          {"monotone_ok", monotone_ok},
                          {"monotone_expected", monotone_expected},
                          {"max_decrease", max_decrease},
                          {"boundary_flux_ok", boundary_flux_ok},
                          {"max_boundary_flux", max_boundary_flux},
                          {"flux_tolerance", flux_tolerance}};
  }
};

/// Checks the model guarantees on a computed solution:
///  (a) 0 <= I <= K within 1e-9*K slack everywhere;
///  (b) I non-decreasing in t at every node, asserted only when the initial
///      profile was admissible (otherwise informational);
///  (c) one-sided boundary difference quotients stay below flux_tol at both
///      ends. The first-order quotient of a zero-flux solution is
///      O(dx * |I_xx|), so the default tolerance scales as dx * K.
inline PropertyReport verify_properties(const SolutionGrid& solution, bool phi_admissible,
                                        double flux_tol = -1.0) {
  PropertyReport rep;
  rep.monotone_expected = phi_admissible;
  const double K = solution.params.K;
  const double slack = 1e-9 * K;
  rep.flux_tolerance = flux_tol > 0.0 ? flux_tol : solution.dx * K;

  rep.min_value = std::numeric_limits<double>::infinity();
  rep.max_value = -std::numeric_limits<double>::infinity();
  rep.max_decrease = 0.0;
  rep.max_boundary_flux = 0.0;
  const std::size_t n = solution.nodes;
  for (std::size_t h = 0; h < solution.rows.size(); ++h) {
    const auto& row = solution.rows[h];
    for (double v : row) {
      rep.min_value = std::min(rep.min_value, v);
      rep.max_value = std::max(rep.max_value, v);
    }
    if (h + 1 < solution.rows.size()) {
      const auto& next = solution.rows[h + 1];
      for (std::size_t i = 0; i < n; ++i)
        rep.max_decrease = std::max(rep.max_decrease, row[i] - next[i]);
    }
    rep.max_boundary_flux = std::max(
        {rep.max_boundary_flux, std::abs(row[1] - row[0]) / solution.dx,
         std::abs(row[n - 1] - row[n - 2]) / solution.dx});
  }
  rep.bounds_ok = rep.min_value >= -slack && rep.max_value <= K + slack;
  rep.monotone_ok = rep.max_decrease <= slack;
  rep.boundary_flux_ok = rep.max_boundary_flux <= rep.flux_tolerance;
  return rep;
}

/// Trapezoid-rule integral of a grid row; constant in time under pure diffusion.
inline double trapezoid_mass(const SolutionGrid& solution, int t) {
  const auto& row = solution.at_hour(t);
  double sum = 0.5 * (row.front() + row.back());
  for (std::size_t i = 1; i + 1 < row.size(); ++i) sum += row[i];
  return sum * solution.dx;
}

/// Solution CSV in the density-surface matrix layout: rows at integer
/// distances (nearest grid nodes), columns t = 1..t_end.
inline void write_solution_csv(const SolutionGrid& solution, std::ostream& out) {
  out << "distance";
  for (int t = 1; t <= solution.t_end; ++t) out << ",t" << t;
  out << '\n';
  int xl = static_cast<int>(std::ceil(solution.x0 - 1e-9));
  int xr = static_cast<int>(std::floor(solution.x_at(solution.nodes - 1) + 1e-9));
  for (int x = xl; x <= xr; ++x) {
    out << x;
    for (int t = 1; t <= solution.t_end; ++t) out << ',' << format_double(predict_at(solution, x, t));
    out << '\n';
  }
}

}  // namespace difflog
