#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "difflog/common.hpp"
#include "difflog/events.hpp"
#include "difflog/pde.hpp"
#include "difflog/spline.hpp"

namespace difflog {

/// Prediction accuracy in percent: 100 * max(0, 1 - |predicted - actual| / actual).
/// The complement of the relative error, floored at zero.
inline double accuracy(double predicted, double actual) {
  if (!(actual > 0.0))
    throw input_error("accuracy undefined for actual = " + format_double(actual));
  return 100.0 * std::max(0.0, 1.0 - std::abs(predicted - actual) / actual);
}

// ---------------------------------------------------------------------------
// Prediction report: per-cell accuracies aggregated Table-style
// ---------------------------------------------------------------------------

struct CellScore {
  int distance = 0;
  int t = 0;
  double predicted = 0.0;
  double actual = 0.0;
  double accuracy = 0.0;
};

struct ExcludedCell {
  int distance = 0;
  int t = 0;
  std::string reason;  // "zero_actual" | "missing_predicted" | "missing_actual"
};

struct PredictionReport {
  std::vector<int> distances;  // requested row order
  std::vector<int> times;      // requested column order
  std::vector<CellScore> cells;
  std::vector<ExcludedCell> excluded;
  std::map<int, double> row_average;  // per distance, mean over its scored cells
  double overall = 0.0;               // mean of the row averages

  const CellScore* find_cell(int distance, int t) const {
    for (const auto& c : cells)
      if (c.distance == distance && c.t == t) return &c;
    return nullptr;
  }

  nlohmann::json to_json() const {
    nlohmann::json jc = nlohmann::json::array();
    for (const auto& c : cells)
      jc.push_back({{"distance", c.distance},
                    {"t", c.t},
                    {"predicted", c.predicted},
                    {"actual", c.actual},
                    {"accuracy", c.accuracy}});
    nlohmann::json je = nlohmann::json::array();
    for (const auto& e : excluded)
      je.push_back({{"distance", e.distance}, {"t", e.t}, {"reason", e.reason}});
    nlohmann::json rows = nlohmann::json::object();
    for (const auto& [d, avg] : row_average) rows[std::to_string(d)] = avg;
    return nlohmann::json{{"cells", jc},
                          {"excluded", je},
                          {"row_average", rows},
                          {"overall", overall},
                          {"distances", distances},
                          {"times", times}};
  }
};

/// Scores a predicted surface against observations cell by cell. Cells with
/// zero actual density or missing from either surface are listed as excluded
/// and kept out of every average. Row averages are per-distance means over
/// t in `times`; the overall figure is the mean of the row averages.
inline PredictionReport evaluate(const DensitySurface& predicted, const DensitySurface& observed,
                                 const std::vector<int>& distances, const std::vector<int>& times) {
  PredictionReport rep;
  rep.distances = distances;
  rep.times = times;
  for (int x : distances) {
    double sum = 0.0;
    std::size_t count = 0;
    for (int t : times) {
      if (!predicted.has_distance(x) || t < 1 || t > predicted.horizon) {
        rep.excluded.push_back({x, t, "missing_predicted"});
        continue;
      }
      if (!observed.has_distance(x) || t > observed.horizon) {
        rep.excluded.push_back({x, t, "missing_actual"});
        continue;
      }
      double actual = observed.value(x, t);
      if (!(actual > 0.0)) {
        rep.excluded.push_back({x, t, "zero_actual"});
        continue;
      }
      double pred = predicted.value(x, t);
      double acc = accuracy(pred, actual);
      rep.cells.push_back({x, t, pred, actual, acc});
      sum += acc;
      ++count;
    }
    if (count > 0) rep.row_average[x] = sum / static_cast<double>(count);
  }
  double total = 0.0;
  for (const auto& [d, avg] : rep.row_average) {
    (void)d;
    total += avg;
  }
  rep.overall = rep.row_average.empty() ? 0.0 : total / static_cast<double>(rep.row_average.size());
  return rep;
}

/// Samples a solved grid at integer distances and whole hours, producing a
/// surface directly comparable with empirical ones.
inline DensitySurface sample_solution(const SolutionGrid& solution,
                                      const std::vector<int>& distances,
                                      const std::vector<int>& times) {
  DensitySurface s;
  s.distances = distances;
  std::sort(s.distances.begin(), s.distances.end());
  s.horizon = times.empty() ? 0 : *std::max_element(times.begin(), times.end());
  for (int x : s.distances) {
    std::vector<double> row(static_cast<std::size_t>(s.horizon), 0.0);
    for (int t : times) row[static_cast<std::size_t>(t - 1)] = predict_at(solution, x, t);
    s.values.push_back(std::move(row));
    s.group_sizes.push_back(0);
  }
  return s;
}

inline PredictionReport evaluate(const SolutionGrid& solution, const DensitySurface& observed,
                                 const std::vector<int>& distances, const std::vector<int>& times) {
  return evaluate(sample_solution(solution, distances, times), observed, distances, times);
}

/// Aligned human-readable table, one row per distance, Average first.
inline void write_report_table(const PredictionReport& rep, std::ostream& out) {
  auto pct = [](double v) {
    std::ostringstream cell;
    cell << std::fixed << std::setprecision(2) << v << '%';
    return cell.str();
  };
  std::ostringstream os;
  os << std::setw(9) << std::left << "Distance" << std::setw(10) << "Average";
  for (int t : rep.times) os << std::setw(10) << ("t = " + std::to_string(t));
  os << '\n';
  for (int x : rep.distances) {
    auto row = rep.row_average.find(x);
    os << std::setw(9) << std::left << x
       << std::setw(10) << (row != rep.row_average.end() ? pct(row->second) : std::string("-"));
    for (int t : rep.times) {
      const auto* c = rep.find_cell(x, t);
      os << std::setw(10) << (c ? pct(c->accuracy) : std::string("excl"));
    }
    os << '\n';
  }
  os << "Overall average: " << pct(rep.overall) << '\n';
  out << os.str();
}

inline void write_report_csv(const PredictionReport& rep, std::ostream& out) {
  out << "distance,t,predicted,actual,accuracy\n";
  for (const auto& c : rep.cells)
    out << c.distance << ',' << c.t << ',' << format_double(c.predicted) << ','
        << format_double(c.actual) << ',' << format_double(c.accuracy) << '\n';
}

// ---------------------------------------------------------------------------
// Parameter fitting: bounded Nelder-Mead over (d, K, a, b, c)
// ---------------------------------------------------------------------------

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct FitBounds {
  Interval d{1e-3, 0.2};
  Interval K{5.0, 100.0};
  Interval a{0.0, 3.0};
  Interval b{0.0, 3.0};
  Interval c{0.01, 1.0};

  std::array<Interval, 5> as_array() const { return {d, K, a, b, c}; }

  void validate() const {
    for (const auto& iv : as_array()) {
      if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi))
        throw input_error("fit bounds must be finite");
      if (iv.lo > iv.hi) throw input_error("fit bounds must satisfy lower <= upper");
    }
  }
};

struct FitOptions {
  int max_evals = 500;   // total objective-evaluation budget across restarts
  int restarts = 3;      // jittered simplex starts, best kept
  std::uint64_t seed = 20250613;
  double dx = 0.05;
  double dt = 0.01;
  double ftol = 1e-12;   // simplex collapse threshold on objective spread
};

struct FitResult {
  DLParams params;
  double sse = std::numeric_limits<double>::infinity();
  double rmse = std::numeric_limits<double>::infinity();
  int evaluations = 0;
  int iterations = 0;
  int rejected = 0;      // candidates whose solve went unstable
  std::size_t cells = 0; // scored observation cells
  bool degenerate = false;

  nlohmann::json to_json() const {
    return nlohmann::json{{"params", params_to_json(params)},
                          {"sse", sse},
                          {"rmse", rmse},
                          {"evaluations", evaluations},
                          {"iterations", iterations},
                          {"rejected", rejected},
                          {"cells", cells},
                          {"degenerate", degenerate}};
  }
};

namespace detail {

inline DLParams params_from_vector(const std::array<double, 5>& v, double l, double L) {
  DLParams p;
  p.d = v[0];
  p.K = v[1];
  p.r = GrowthRate{v[2], v[3], v[4]};
  p.l = l;
  p.L = L;
  return p;
}

}  // namespace detail

/// Sum of squared differences between the model solution with the given
/// parameters and the observed surface, over the requested time window at the
/// observed integer distances. Cells with zero observed density are skipped.
/// Throws solver_error when the candidate makes the solve unstable.
inline double fit_objective(const DensitySurface& observed, const InitialDensity& phi,
                            const DLParams& params, const std::vector<int>& window, double dx,
                            double dt, std::size_t* cells_out = nullptr) {
  int t_max = *std::max_element(window.begin(), window.end());
  auto solution = solve(params, phi, t_max, dx, dt);
  double sse = 0.0;
  std::size_t cells = 0;
  for (std::size_t i = 0; i < observed.distances.size(); ++i) {
    int x = observed.distances[i];
    if (x < params.l - 1e-9 || x > params.L + 1e-9) continue;
    for (int t : window) {
      if (t > observed.horizon) continue;
      double actual = observed.values[i][static_cast<std::size_t>(t - 1)];
      if (!(actual > 0.0)) continue;
      double diff = predict_at(solution, x, t) - actual;
      sse += diff * diff;
      ++cells;
    }
  }
  if (cells_out) *cells_out = cells;
  return sse;
}

/// Least-squares calibration of (d, K, a, b, c) against an observed surface.
/// Nelder-Mead simplex restricted to the box `bounds`; every candidate is
/// clamped into the box before evaluation, so the returned parameters always
/// respect the bounds. Deterministic for a fixed options.seed. Dimensions
/// with lo == hi are held fixed; if all are fixed the point is returned
/// without any search. The time window never includes t = 1 (the fitted
/// initial condition).
inline FitResult fit(const DensitySurface& observed, const InitialDensity& phi,
                     const FitBounds& bounds, std::vector<int> window,
                     const FitOptions& options = {}) {
  bounds.validate();
  if (observed.horizon < 3)
    throw input_error("fit: observed surface needs at least 2 time columns beyond t = 1");
  window.erase(std::remove_if(window.begin(), window.end(),
                              [&](int t) { return t <= 1 || t > observed.horizon; }),
               window.end());
  if (window.empty()) throw input_error("fit: empty objective window after dropping t <= 1");

  const auto box = bounds.as_array();
  const double l = phi.domain_left(), L = phi.domain_right();
  auto clamp_vec = [&](std::array<double, 5> v) {
    for (std::size_t i = 0; i < 5; ++i) v[i] = std::clamp(v[i], box[i].lo, box[i].hi);
    return v;
  };

  FitResult best;
  int evals = 0;
  int rejected = 0;
  const double penalty = 1e30;
  auto objective = [&](const std::array<double, 5>& raw) {
    auto v = clamp_vec(raw);
    ++evals;
    try {
      std::size_t cells = 0;
      double sse =
          fit_objective(observed, phi, detail::params_from_vector(v, l, L), window, options.dx,
                        options.dt, &cells);
      if (!std::isfinite(sse)) throw solver_error("non-finite objective");
      if (sse < best.sse) {
        best.sse = sse;
        best.params = detail::params_from_vector(v, l, L);
        best.cells = cells;
      }
      return sse;
    } catch (const solver_error&) {
      ++rejected;
      return penalty + 1e-3 * static_cast<double>(rejected);  // keep ordering deterministic
    } catch (const input_error&) {
      ++rejected;
      return penalty + 1e-3 * static_cast<double>(rejected);
    }
  };

  std::vector<std::size_t> free_dims;
  for (std::size_t i = 0; i < 5; ++i)
    if (box[i].hi > box[i].lo) free_dims.push_back(i);

  std::array<double, 5> center{};
  for (std::size_t i = 0; i < 5; ++i) center[i] = 0.5 * (box[i].lo + box[i].hi);

  if (free_dims.empty()) {
    // fully pinned: evaluate the single admissible point
    objective(center);
    best.evaluations = evals;
    best.rejected = rejected;
    best.degenerate = true;
    if (best.cells > 0) best.rmse = std::sqrt(best.sse / static_cast<double>(best.cells));
    if (!std::isfinite(best.sse)) throw solver_error("fit: the pinned parameter point is unstable");
    return best;
  }

  const std::size_t m = free_dims.size();
  std::uint64_t rng_state = options.seed;
  auto next_unit = [&]() { return to_unit_double(rng_state = splitmix64(rng_state)); };

  // restarts run in sequence until they converge (objective spread < ftol);
  // whatever remains of the evaluation budget flows to the next jittered start
  int iterations = 0;
  for (int restart = 0; restart < options.restarts && evals < options.max_evals; ++restart) {
    auto start = center;
    if (restart > 0)
      for (auto i : free_dims) start[i] += (next_unit() - 0.5) * 0.5 * (box[i].hi - box[i].lo);
    start = clamp_vec(start);

    // simplex over the free dimensions only
    std::vector<std::array<double, 5>> simplex(m + 1, start);
    for (std::size_t j = 0; j < m; ++j) {
      auto i = free_dims[j];
      double step = 0.10 * (box[i].hi - box[i].lo);
      simplex[j + 1][i] = std::clamp(start[i] + step, box[i].lo, box[i].hi);
      if (simplex[j + 1][i] == start[i]) simplex[j + 1][i] = start[i] - step;
    }
    std::vector<double> f(m + 1);
    for (std::size_t j = 0; j <= m; ++j) f[j] = objective(simplex[j]);

    while (evals < options.max_evals) {
      ++iterations;
      // order vertices by objective
      std::vector<std::size_t> order(m + 1);
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
      if (f[order[m]] - f[order[0]] < options.ftol) break;

      std::array<double, 5> centroid = {0, 0, 0, 0, 0};
      for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i < 5; ++i) centroid[i] += simplex[order[j]][i] / static_cast<double>(m);
      const auto& worst = simplex[order[m]];

      auto move = [&](double coef) {
        std::array<double, 5> v = centroid;
        for (auto i : free_dims) v[i] = centroid[i] + coef * (centroid[i] - worst[i]);
        return clamp_vec(v);
      };

      auto reflected = move(1.0);
      double fr = objective(reflected);
      if (fr < f[order[0]]) {
        auto expanded = move(2.0);
        double fe = objective(expanded);
        if (fe < fr) {
          simplex[order[m]] = expanded;
          f[order[m]] = fe;
        } else {
          simplex[order[m]] = reflected;
          f[order[m]] = fr;
        }
      } else if (fr < f[order[m - 1]]) {
        simplex[order[m]] = reflected;
        f[order[m]] = fr;
      } else {
        auto contracted = move(fr < f[order[m]] ? 0.5 : -0.5);
        double fc = objective(contracted);
        if (fc < std::min(fr, f[order[m]])) {
          simplex[order[m]] = contracted;
          f[order[m]] = fc;
        } else {
          // shrink toward the best vertex
          for (std::size_t j = 1; j <= m; ++j) {
            auto& v = simplex[order[j]];
            for (auto i : free_dims)
              v[i] = simplex[order[0]][i] + 0.5 * (v[i] - simplex[order[0]][i]);
            v = clamp_vec(v);
            f[order[j]] = objective(v);
            if (evals >= options.max_evals) break;
          }
        }
      }
    }
  }

  best.evaluations = evals;
  best.iterations = iterations;
  best.rejected = rejected;
  if (!std::isfinite(best.sse) || best.sse >= penalty)
    throw solver_error("fit failed: every candidate parameter set was rejected as unstable");
  if (best.cells > 0) best.rmse = std::sqrt(best.sse / static_cast<double>(best.cells));
  return best;
}

}  // namespace difflog
