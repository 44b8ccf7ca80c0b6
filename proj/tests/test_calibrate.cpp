#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "difflog/calibrate.hpp"
#include "support.hpp"

using namespace difflog;

TEST_CASE("accuracy metric on the tagged examples") {
  CHECK(accuracy(10.0, 10.0) == 100.0);
  CHECK(accuracy(9.0, 10.0) == Catch::Approx(90.0).margin(1e-12));
  CHECK(accuracy(25.0, 10.0) == 0.0);  // complement would be negative, floored
  CHECK_THROWS_AS(accuracy(5.0, 0.0), input_error);
}

TEST_CASE("accuracy is scale invariant") {
  gen::Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    double a = rng.uniform(0.1, 50.0);
    double p = rng.uniform(0.0, 80.0);
    double s = rng.uniform(0.01, 100.0);
    CHECK(accuracy(p, a) == Catch::Approx(accuracy(p * s, a * s)).margin(1e-9));
  }
}

namespace {

DensitySurface make_surface(std::vector<int> distances, int horizon,
                            std::vector<std::vector<double>> values) {
  DensitySurface s;
  s.distances = std::move(distances);
  s.horizon = horizon;
  s.values = std::move(values);
  s.group_sizes.assign(s.distances.size(), 0);
  return s;
}

}  // namespace

TEST_CASE("evaluating identical surfaces scores exactly 100 percent") {
  auto s = make_surface({1, 2, 3}, 6,
                        {{1, 2, 3, 4, 5, 6}, {2, 3, 4, 5, 6, 7}, {1, 1, 2, 3, 5, 8}});
  auto rep = evaluate(s, s, {1, 2, 3}, {2, 3, 4, 5, 6});
  CHECK(rep.overall == 100.0);
  for (const auto& [d, avg] : rep.row_average) {
    (void)d;
    CHECK(avg == 100.0);
  }
  CHECK(rep.cells.size() == 15);
  CHECK(rep.excluded.empty());
}

TEST_CASE("single scored cell: predicted 9 against actual 10 reads 90 percent") {
  auto predicted = make_surface({1}, 2, {{9, 9}});
  auto observed = make_surface({1}, 2, {{10, 10}});
  auto rep = evaluate(predicted, observed, {1}, {2});
  REQUIRE(rep.cells.size() == 1);
  CHECK(rep.cells[0].accuracy == Catch::Approx(90.0));
  CHECK(rep.overall == Catch::Approx(90.0));
}

TEST_CASE("zero-actual and missing cells are excluded, not skipped silently") {
  auto predicted = make_surface({1, 2}, 3, {{5, 5, 5}, {5, 5, 5}});
  auto observed = make_surface({1}, 3, {{0, 10, 10}});
  auto rep = evaluate(predicted, observed, {1, 2}, {1, 2, 3});
  CHECK(rep.cells.size() == 2);  // (1,2) and (1,3)
  REQUIRE(rep.excluded.size() == 4);
  int zero_actual = 0, missing = 0;
  for (const auto& e : rep.excluded) {
    if (e.reason == "zero_actual") ++zero_actual;
    if (e.reason == "missing_actual") ++missing;
  }
  CHECK(zero_actual == 1);  // (1,1)
  CHECK(missing == 3);      // distance 2 has no observation
  CHECK(rep.row_average.count(2) == 0);
}

TEST_CASE("report table has the Average-then-hours layout") {
  auto s = make_surface({1, 2, 3, 4, 5, 6}, 6,
                        {{1, 2, 3, 4, 5, 6},
                         {1, 2, 3, 4, 5, 6},
                         {1, 2, 3, 4, 5, 6},
                         {1, 2, 3, 4, 5, 6},
                         {1, 2, 3, 4, 5, 6},
                         {1, 2, 3, 4, 5, 6}});
  auto rep = evaluate(s, s, {1, 2, 3, 4, 5, 6}, {2, 3, 4, 5, 6});
  std::ostringstream table;
  write_report_table(rep, table);
  auto text = table.str();
  CHECK(text.find("Distance") != std::string::npos);
  CHECK(text.find("Average") != std::string::npos);
  for (int t = 2; t <= 6; ++t)
    CHECK(text.find("t = " + std::to_string(t)) != std::string::npos);
  // six distance rows + header + overall line
  CHECK(std::count(text.begin(), text.end(), '\n') == 8);
  CHECK(text.find("Overall average: 100.00%") != std::string::npos);
}

TEST_CASE("report JSON and CSV writers carry the cells") {
  auto predicted = make_surface({1}, 2, {{9, 9}});
  auto observed = make_surface({1}, 2, {{10, 10}});
  auto rep = evaluate(predicted, observed, {1}, {2});
  auto j = rep.to_json();
  CHECK(j.at("overall").get<double>() == Catch::Approx(90.0));
  CHECK(j.at("cells").size() == 1);
  std::ostringstream csv;
  write_report_csv(rep, csv);
  CHECK(csv.str() == "distance,t,predicted,actual,accuracy\n1,2,9,10,90\n");
}

// ---------------------------------------------------------------------------
// fitting
// ---------------------------------------------------------------------------

namespace {

DLParams truth_params() {
  DLParams p;
  p.d = 0.01;
  p.K = 25.0;
  p.r = GrowthRate{1.4, 1.5, 0.25};
  p.l = 1.0;
  p.L = 5.0;
  return p;
}

}  // namespace

TEST_CASE("degenerate bounds return the pinned point without search") {
  auto truth = truth_params();
  auto phi = build_initial_density({{1, 2}, {2, 3}, {3, 5}, {4, 8}, {5, 12}});
  auto observed = sample_solution(solve(truth, phi, 6, 0.05, 0.01), {1, 2, 3, 4, 5},
                                  {1, 2, 3, 4, 5, 6});
  FitBounds pinned;
  pinned.d = {truth.d, truth.d};
  pinned.K = {truth.K, truth.K};
  pinned.a = {truth.r.a, truth.r.a};
  pinned.b = {truth.r.b, truth.r.b};
  pinned.c = {truth.r.c, truth.r.c};
  auto result = fit(observed, phi, pinned, {2, 3, 4, 5, 6});
  CHECK(result.degenerate);
  CHECK(result.evaluations == 1);
  CHECK(result.sse == Catch::Approx(0.0).margin(1e-18));
  CHECK(result.params.d == truth.d);
  CHECK(result.params.K == truth.K);
}

TEST_CASE("one free parameter: objective is monotone in the distance to truth") {
  auto truth = truth_params();
  auto phi = build_initial_density({{1, 2}, {2, 3}, {3, 5}, {4, 8}, {5, 12}});
  auto observed =
      sample_solution(solve(truth, phi, 4, 0.05, 0.01), {1, 2, 3, 4, 5}, {1, 2, 3, 4});

  // 1D scan of the objective in a around the true 1.4, everything else pinned
  std::vector<int> window{2, 3, 4};
  double prev_left = -1.0, prev_right = -1.0;
  for (double offset : {0.0, 0.2, 0.4, 0.8, 1.2}) {
    DLParams p = truth;
    p.r.a = truth.r.a - offset;
    double left = fit_objective(observed, phi, p, window, 0.05, 0.01);
    p.r.a = truth.r.a + offset;
    double right = fit_objective(observed, phi, p, window, 0.05, 0.01);
    if (offset == 0.0) {
      CHECK(left == Catch::Approx(0.0).margin(1e-18));
    } else {
      CHECK(left > prev_left);
      CHECK(right > prev_right);
    }
    prev_left = left;
    prev_right = right;
  }

  FitBounds bounds;
  bounds.d = {truth.d, truth.d};
  bounds.K = {truth.K, truth.K};
  bounds.b = {truth.r.b, truth.r.b};
  bounds.c = {truth.r.c, truth.r.c};
  bounds.a = {0.0, 3.0};
  FitOptions options;
  options.max_evals = 120;
  auto result = fit(observed, phi, bounds, window, options);
  CHECK(result.params.r.a == Catch::Approx(truth.r.a).margin(0.01));
  CHECK(result.rmse < 1e-3 * truth.K);
}

TEST_CASE("fit never leaves the supplied bounds and drops t = 1 from the window") {
  auto truth = truth_params();
  auto phi = build_initial_density({{1, 2}, {2, 3}, {3, 5}, {4, 8}, {5, 12}});
  auto observed =
      sample_solution(solve(truth, phi, 4, 0.05, 0.01), {1, 2, 3, 4, 5}, {1, 2, 3, 4});
  FitBounds bounds;
  bounds.d = {0.005, 0.02};
  bounds.K = {20.0, 30.0};
  bounds.a = {0.5, 2.0};
  bounds.b = {1.0, 2.0};
  bounds.c = {0.1, 0.5};
  FitOptions options;
  options.max_evals = 90;
  auto result = fit(observed, phi, bounds, {1, 2, 3, 4}, options);
  CHECK(result.params.d >= bounds.d.lo);
  CHECK(result.params.d <= bounds.d.hi);
  CHECK(result.params.K >= bounds.K.lo);
  CHECK(result.params.K <= bounds.K.hi);
  CHECK(result.params.r.a >= bounds.a.lo);
  CHECK(result.params.r.a <= bounds.a.hi);
  CHECK(result.params.r.b >= bounds.b.lo);
  CHECK(result.params.r.b <= bounds.b.hi);
  CHECK(result.params.r.c >= bounds.c.lo);
  CHECK(result.params.r.c <= bounds.c.hi);
  CHECK(result.evaluations <= 90 + 6);  // initial simplex may finish a restart
}

TEST_CASE("fit is deterministic for a fixed seed") {
  auto truth = truth_params();
  auto phi = build_initial_density({{1, 2}, {2, 3}, {3, 5}, {4, 8}, {5, 12}});
  auto observed =
      sample_solution(solve(truth, phi, 4, 0.05, 0.01), {1, 2, 3, 4, 5}, {1, 2, 3, 4});
  FitOptions options;
  options.max_evals = 80;
  options.restarts = 3;
  auto first = fit(observed, phi, FitBounds{}, {2, 3, 4}, options);
  auto second = fit(observed, phi, FitBounds{}, {2, 3, 4}, options);
  CHECK(first.sse == second.sse);
  CHECK(first.params.d == second.params.d);
  CHECK(first.params.K == second.params.K);
  CHECK(first.params.r.a == second.params.r.a);
  CHECK(first.params.r.b == second.params.r.b);
  CHECK(first.params.r.c == second.params.r.c);
  CHECK(first.evaluations == second.evaluations);
}

TEST_CASE("fit input validation") {
  auto phi = build_initial_density({{1, 2}, {2, 3}, {3, 5}});
  auto thin = make_surface({1, 2, 3}, 2, {{1, 2}, {1, 2}, {1, 2}});
  CHECK_THROWS_AS(fit(thin, phi, FitBounds{}, {2}), input_error);  // needs >= 2 columns past t=1

  auto s = make_surface({1, 2, 3}, 4, {{1, 2, 3, 4}, {1, 2, 3, 4}, {1, 2, 3, 4}});
  CHECK_THROWS_AS(fit(s, phi, FitBounds{}, {1}), input_error);  // window collapses
  FitBounds bad;
  bad.d = {0.2, 0.1};
  CHECK_THROWS_AS(fit(s, phi, bad, {2, 3}), input_error);
}
