#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <nlohmann/json.hpp>

#include "difflog/common.hpp"
#include "difflog/params.hpp"

namespace difflog {

/// Initial density profile phi(x): a clamped cubic spline with zero slope at
/// both ends, twice continuously differentiable on its whole domain.
/// Stored in moment form: second derivatives M_i at the knots.
class InitialDensity {
 public:
  InitialDensity(std::vector<double> xs, std::vector<double> ys, std::vector<double> moments)
      : x_(std::move(xs)), y_(std::move(ys)), m_(std::move(moments)) {}

  /// Uniform profile of the given non-negative value; zero slope everywhere.
  static InitialDensity constant(double l, double L, double value) {
    if (!(L > l)) throw input_error("InitialDensity::constant: need L > l");
    if (value < 0.0) throw input_error("InitialDensity::constant: negative value");
    return InitialDensity({l, 0.5 * (l + L), L}, {value, value, value}, {0.0, 0.0, 0.0});
  }

  double domain_left() const { return x_.front(); }
  double domain_right() const { return x_.back(); }
  const std::vector<double>& knot_x() const { return x_; }
  const std::vector<double>& knot_values() const { return y_; }
  const std::vector<double>& moments() const { return m_; }

  double evaluate(double x) const {
    auto i = interval(x);
    double h = x_[i + 1] - x_[i];
    double t0 = x_[i + 1] - x, t1 = x - x_[i];
    return m_[i] * t0 * t0 * t0 / (6.0 * h) + m_[i + 1] * t1 * t1 * t1 / (6.0 * h) +
           (y_[i] / h - m_[i] * h / 6.0) * t0 + (y_[i + 1] / h - m_[i + 1] * h / 6.0) * t1;
  }

  double derivative(double x) const {
    auto i = interval(x);
    double h = x_[i + 1] - x_[i];
    double t0 = x_[i + 1] - x, t1 = x - x_[i];
    return -m_[i] * t0 * t0 / (2.0 * h) + m_[i + 1] * t1 * t1 / (2.0 * h) +
           (y_[i + 1] - y_[i]) / h - (m_[i + 1] - m_[i]) * h / 6.0;
  }

  double second_derivative(double x) const {
    auto i = interval(x);
    double h = x_[i + 1] - x_[i];
    return (m_[i] * (x_[i + 1] - x) + m_[i + 1] * (x - x_[i])) / h;
  }

  /// Exact minimum of the spline over its domain, via the critical points of
  /// each cubic piece (the derivative is a quadratic solved in closed form).
  double min_value() const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
      best = std::min({best, y_[i], y_[i + 1]});
      double h = x_[i + 1] - x_[i];
      // phi'(x) on the piece as a quadratic A*s^2 + B*s + C in s = x - x_i
      double A = (m_[i + 1] - m_[i]) / (2.0 * h);
      double B = m_[i];
      double C = -m_[i] * h / 2.0 + (y_[i + 1] - y_[i]) / h - (m_[i + 1] - m_[i]) * h / 6.0;
      auto consider = [&](double s) {
        if (s > 0.0 && s < h) best = std::min(best, evaluate(x_[i] + s));
      };
      if (std::abs(A) < 1e-300) {
        if (std::abs(B) > 0.0) consider(-C / B);
      } else {
        double disc = B * B - 4.0 * A * C;
        if (disc >= 0.0) {
          double sq = std::sqrt(disc);
          consider((-B + sq) / (2.0 * A));
          consider((-B - sq) / (2.0 * A));
        }
      }
    }
    return best;
  }

  nlohmann::json coefficients_json() const {
    nlohmann::json pieces = nlohmann::json::array();
    for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
      double h = x_[i + 1] - x_[i];
      // cubic in s = x - x_i: c0 + c1 s + c2 s^2 + c3 s^3
      double c0 = y_[i];
      double c1 = (y_[i + 1] - y_[i]) / h - (2.0 * m_[i] + m_[i + 1]) * h / 6.0;
      double c2 = m_[i] / 2.0;
      double c3 = (m_[i + 1] - m_[i]) / (6.0 * h);
      pieces.push_back({{"x_left", x_[i]},
                        {"x_right", x_[i + 1]},
                        {"c0", c0},
                        {"c1", c1},
                        {"c2", c2},
                        {"c3", c3}});
    }
    return nlohmann::json{{"knots_x", x_},
                          {"knots_value", y_},
                          {"second_derivatives", m_},
                          {"pieces", pieces},
                          {"domain", {x_.front(), x_.back()}}};
  }

 private:
  std::size_t interval(double x) const {
    if (x < x_.front() || x > x_.back())
      throw input_error("initial density evaluated outside [" + format_double(x_.front()) + ", " +
                        format_double(x_.back()) + "] at x = " + format_double(x));
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    auto i = static_cast<std::size_t>(std::distance(x_.begin(), it));
    if (i > 0) --i;
    if (i + 1 >= x_.size()) i = x_.size() - 2;
    return i;
  }

  std::vector<double> x_, y_, m_;
};

namespace detail {

/// Thomas recurrence for a tridiagonal system; exact O(n) elimination.
inline std::vector<double> solve_tridiagonal(std::vector<double> lower, std::vector<double> diag,
                                             std::vector<double> upper, std::vector<double> rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i];
  return x;
}

}  // namespace detail

/// Builds phi from discrete density samples: the clamped cubic spline through
/// all points with zero slope at both ends. Fails if the spline dips below
/// zero anywhere between knots.
inline InitialDensity build_initial_density(const std::vector<std::pair<double, double>>& samples) {
  const std::size_t n = samples.size();
  if (n < 3) throw input_error("initial density needs at least 3 samples");
  std::vector<double> x(n), y(n);
  double ymax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = samples[i].first;
    y[i] = samples[i].second;
    if (i > 0 && !(x[i] > x[i - 1]))
      throw input_error("sample abscissae must be strictly increasing");
    if (y[i] < 0.0) throw input_error("negative density sample at x = " + format_double(x[i]));
    ymax = std::max(ymax, y[i]);
  }
  if (ymax == 0.0) throw input_error("all density samples are zero");

  // Moment equations for the clamped spline (end slopes = 0):
  //   (h0/3) M0 + (h0/6) M1                            = (y1-y0)/h0
  //   (h_{i-1}/6) M_{i-1} + ((h_{i-1}+h_i)/3) M_i + (h_i/6) M_{i+1}
  //                                                    = (y_{i+1}-y_i)/h_i - (y_i-y_{i-1})/h_{i-1}
  //   (h_{n-2}/6) M_{n-2} + (h_{n-2}/3) M_{n-1}        = -(y_{n-1}-y_{n-2})/h_{n-2}
  std::vector<double> lower(n, 0.0), diag(n, 0.0), upper(n, 0.0), rhs(n, 0.0);
  auto h = [&](std::size_t i) { return x[i + 1] - x[i]; };
  diag[0] = h(0) / 3.0;
  upper[0] = h(0) / 6.0;
  rhs[0] = (y[1] - y[0]) / h(0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    lower[i] = h(i - 1) / 6.0;
    diag[i] = (h(i - 1) + h(i)) / 3.0;
    upper[i] = h(i) / 6.0;
    rhs[i] = (y[i + 1] - y[i]) / h(i) - (y[i] - y[i - 1]) / h(i - 1);
  }
  lower[n - 1] = h(n - 2) / 6.0;
  diag[n - 1] = h(n - 2) / 3.0;
  rhs[n - 1] = -(y[n - 1] - y[n - 2]) / h(n - 2);

  InitialDensity phi(std::move(x), std::move(y),
                     detail::solve_tridiagonal(std::move(lower), std::move(diag), std::move(upper),
                                               std::move(rhs)));
  double mn = phi.min_value();
  if (mn < -1e-12 * std::max(1.0, ymax))
    throw input_error("interpolated density dips below zero (min " + format_double(mn) +
                      "); inter-knot overshoot makes this profile unusable");
  return phi;
}

// ---------------------------------------------------------------------------
// Lower-solution admissibility: d*phi'' + r(1)*phi*(1 - phi/K) >= 0 on [l, L]
// ---------------------------------------------------------------------------

struct AdmissibilityReport {
  bool passed = false;
  double min_residual = 0.0;
  double min_residual_x = 0.0;
  std::vector<double> violations;  // grid points with negative residual
  double grid_step = 0.0;
  double r_at_1 = 0.0;
  double end_slope_left = 0.0;
  double end_slope_right = 0.0;

  nlohmann::json to_json() const {
    return nlohmann::json{{"passed", passed},
                          {"min_residual", min_residual},
                          {"min_residual_x", min_residual_x},
                          {"violations", violations},
                          {"grid_step", grid_step},
                          {"r_at_1", r_at_1},
                          {"end_slope_left", end_slope_left},
                          {"end_slope_right", end_slope_right}};
  }
};

/// Grid scan of the lower-solution inequality. When r is time-dependent it is
/// evaluated at t = 1, the time the profile was observed.
inline AdmissibilityReport check_lower_solution(const InitialDensity& phi, const DLParams& params,
                                                double grid_step = 0.01) {
  if (!(grid_step > 0.0)) throw input_error("check_lower_solution: grid_step must be > 0");
  AdmissibilityReport rep;
  rep.grid_step = grid_step;
  rep.r_at_1 = params.r.at(1.0);
  rep.end_slope_left = phi.derivative(phi.domain_left());
  rep.end_slope_right = phi.derivative(phi.domain_right());

  const double l = phi.domain_left(), L = phi.domain_right();
  const double tol = -1e-12 * std::max(1.0, params.K);
  rep.min_residual = std::numeric_limits<double>::infinity();
  auto n = static_cast<std::size_t>(std::ceil((L - l) / grid_step));
  for (std::size_t i = 0; i <= n; ++i) {
    double xq = std::min(l + static_cast<double>(i) * grid_step, L);
    double v = phi.evaluate(xq);
    double res = params.d * phi.second_derivative(xq) + rep.r_at_1 * v * (1.0 - v / params.K);
    if (res < rep.min_residual) {
      rep.min_residual = res;
      rep.min_residual_x = xq;
    }
    if (res < tol) rep.violations.push_back(xq);
  }
  rep.passed = rep.violations.empty();
  return rep;
}

}  // namespace difflog
