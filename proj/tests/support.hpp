#pragma once

// Test-side oracles and generators. Everything here is deliberately
// independent of the library's implementation paths: the spline oracle works
// in slope (Hermite) form with dense elimination, the distance oracle uses
// relaxation instead of BFS, and the logistic reference is the closed form.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracle {

// ---------------------------------------------------------------------------
// all-pairs reachability distances by repeated relaxation (no BFS)
// ---------------------------------------------------------------------------

/// dist[v] = length of the shortest edge chain source -> v along the given
/// directed edges, or -1 when unreachable. O(V*E) relaxation to a fixpoint.
inline std::vector<int> relaxation_distances(std::size_t n,
                                             const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                                             std::size_t source) {
  const int inf = 1 << 28;
  std::vector<int> dist(n, inf);
  dist[source] = 0;
  for (std::size_t pass = 0; pass < n; ++pass) {
    bool changed = false;
    for (auto [u, v] : edges) {
      if (dist[u] + 1 < dist[v]) {
        dist[v] = dist[u] + 1;
        changed = true;
      }
    }
    if (!changed) break;
  }
  for (auto& d : dist)
    if (d >= inf) d = -1;
  return dist;
}

// ---------------------------------------------------------------------------
// clamped cubic spline in slope form, dense Gaussian elimination
// ---------------------------------------------------------------------------

class ClampedSplineSlopeForm {
 public:
  ClampedSplineSlopeForm(std::vector<double> xs, std::vector<double> ys)
      : x_(std::move(xs)), y_(std::move(ys)), s_(x_.size(), 0.0) {
    const std::size_t n = x_.size();
    if (n < 3) throw std::invalid_argument("need >= 3 knots");
    auto h = [&](std::size_t i) { return x_[i + 1] - x_[i]; };
    // unknown interior slopes s_1..s_{n-2}; s_0 = s_{n-1} = 0 (flat ends)
    const std::size_t m = n - 2;
    std::vector<std::vector<double>> A(m, std::vector<double>(m, 0.0));
    std::vector<double> rhs(m, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      std::size_t row = i - 1;
      double hl = h(i - 1), hr = h(i);
      if (i > 1) A[row][row - 1] = 1.0 / hl;
      A[row][row] = 2.0 * (1.0 / hl + 1.0 / hr);
      if (i + 2 < n) A[row][row + 1] = 1.0 / hr;
      rhs[row] = 3.0 * ((y_[i] - y_[i - 1]) / (hl * hl) + (y_[i + 1] - y_[i]) / (hr * hr));
    }
    // dense elimination with partial pivoting
    for (std::size_t col = 0; col < m; ++col) {
      std::size_t piv = col;
      for (std::size_t r = col + 1; r < m; ++r)
        if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
      std::swap(A[col], A[piv]);
      std::swap(rhs[col], rhs[piv]);
      for (std::size_t r = col + 1; r < m; ++r) {
        double f = A[r][col] / A[col][col];
        for (std::size_t c = col; c < m; ++c) A[r][c] -= f * A[col][c];
        rhs[r] -= f * rhs[col];
      }
    }
    for (std::size_t r = m; r-- > 0;) {
      double acc = rhs[r];
      for (std::size_t c = r + 1; c < m; ++c) acc -= A[r][c] * s_[c + 1];
      s_[r + 1] = acc / A[r][r];
    }
  }

  double value(double x) const {
    std::size_t i = interval(x);
    double h = x_[i + 1] - x_[i];
    double u = (x - x_[i]) / h;
    double u2 = u * u, u3 = u2 * u;
    return y_[i] * (2 * u3 - 3 * u2 + 1) + h * s_[i] * (u3 - 2 * u2 + u) +
           y_[i + 1] * (-2 * u3 + 3 * u2) + h * s_[i + 1] * (u3 - u2);
  }

  double second_derivative(double x) const {
    std::size_t i = interval(x);
    double h = x_[i + 1] - x_[i];
    double u = (x - x_[i]) / h;
    return (y_[i] * (12 * u - 6) + y_[i + 1] * (6 - 12 * u)) / (h * h) +
           (s_[i] * (6 * u - 4) + s_[i + 1] * (6 * u - 2)) / h;
  }

 private:
  std::size_t interval(double x) const {
    std::size_t i = 0;
    while (i + 2 < x_.size() && x >= x_[i + 1]) ++i;
    return i;
  }
  std::vector<double> x_, y_, s_;
};

// ---------------------------------------------------------------------------
// time-varying logistic closed form
// ---------------------------------------------------------------------------

/// R(t) = integral of a*exp(-b*(s-1)) + c over [1, t].
inline double rate_integral(double a, double b, double c, double t) {
  double exp_part = b > 0.0 ? (a / b) * (1.0 - std::exp(-b * (t - 1.0))) : a * (t - 1.0);
  return exp_part + c * (t - 1.0);
}

/// Exact solution of I' = r(t) I (1 - I/K), I(1) = c0, for uniform data.
inline double logistic_closed_form(double c0, double K, double a, double b, double c, double t) {
  if (c0 == 0.0) return 0.0;
  return K / (1.0 + (K / c0 - 1.0) * std::exp(-rate_integral(a, b, c, t)));
}

}  // namespace oracle

namespace gen {

/// Deterministic RNG for tests; Mersenne engine with explicit helpers so a
/// seed pins the whole scenario.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(eng_);
  }
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(eng_);
  }
  bool chance(double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(eng_) < p; }
  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

/// Random directed edge list over n nodes (no self-loops, may be sparse).
inline std::vector<std::pair<std::size_t, std::size_t>> random_edges(Rng& rng, std::size_t n,
                                                                     double p) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v)
      if (u != v && rng.chance(p)) edges.emplace_back(u, v);
  return edges;
}

/// Smooth increasing convex-ish profile with values well inside (0, K);
/// the usual shape of an admissible initial density.
inline std::vector<std::pair<double, double>> admissible_profile(Rng& rng, double K,
                                                                 std::size_t knots = 5) {
  double base = rng.uniform(0.03, 0.25) * K;
  double amp = rng.uniform(0.10, 0.55) * K;
  if (base + amp > 0.88 * K) amp = 0.88 * K - base;
  double power = rng.uniform(1.3, 3.0);
  std::vector<std::pair<double, double>> samples;
  for (std::size_t i = 0; i < knots; ++i) {
    double u = static_cast<double>(i) / static_cast<double>(knots - 1);
    samples.emplace_back(1.0 + static_cast<double>(i), base + amp * std::pow(u, power));
  }
  return samples;
}

/// Unstructured positive profile; frequently fails the lower-solution check.
inline std::vector<std::pair<double, double>> wiggly_profile(Rng& rng, double K,
                                                             std::size_t knots = 5) {
  std::vector<std::pair<double, double>> samples;
  for (std::size_t i = 0; i < knots; ++i)
    samples.emplace_back(1.0 + static_cast<double>(i), rng.uniform(0.05, 0.9) * K);
  return samples;
}

}  // namespace gen
