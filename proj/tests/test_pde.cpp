#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "difflog/pde.hpp"
#include "support.hpp"

using namespace difflog;

namespace {

DLParams reference_params() {
  DLParams p;
  p.d = 0.01;
  p.K = 25.0;
  p.r = GrowthRate{1.4, 1.5, 0.25};
  p.l = 1.0;
  p.L = 5.0;
  return p;
}

}  // namespace

TEST_CASE("growth rate: reference parameters") {
  auto p = reference_params();
  CHECK(growth_rate(p, 1.0) == Catch::Approx(1.65).margin(1e-15));
  CHECK_THROWS_AS(growth_rate(p, 0.99), input_error);

  // decreasing toward c, always above it (until the exponential hits roundoff)
  double prev = growth_rate(p, 1.0);
  for (double t = 2.0; t <= 20.0; t += 1.0) {
    double r = growth_rate(p, t);
    CHECK(r < prev);
    CHECK(r > 0.25);
    prev = r;
  }
  CHECK(growth_rate(p, 40.0) == Catch::Approx(0.25).margin(1e-12));

  DLParams constant = p;
  constant.r = GrowthRate{0.0, 0.0, 0.7};
  CHECK(growth_rate(constant, 1.0) == 0.7);
  CHECK(growth_rate(constant, 17.0) == 0.7);
}

TEST_CASE("growth rate validation") {
  GrowthRate bad{-0.1, 1.0, 0.2};
  CHECK_THROWS_AS(bad.validate(), input_error);
  GrowthRate zero{0.0, 0.0, 0.0};  // pure diffusion is allowed
  CHECK_NOTHROW(zero.validate());
}

TEST_CASE("equilibria: zero and carrying capacity stay put") {
  auto p = reference_params();
  auto zero = solve_on_grid(p, std::vector<double>(81, 0.0), 10, 0.05, 0.01);
  auto full = solve_on_grid(p, std::vector<double>(81, p.K), 10, 0.05, 0.01);
  for (int t = 1; t <= 10; ++t) {
    for (double v : zero.at_hour(t)) CHECK(v == 0.0);
    for (double v : full.at_hour(t)) CHECK(v == Catch::Approx(p.K).margin(1e-12));
  }
}

TEST_CASE("uniform initial data reproduces the time-varying logistic closed form") {
  auto p = reference_params();
  for (double c0 : {2.5, 12.5, 22.5}) {
    auto phi = InitialDensity::constant(p.l, p.L, c0);
    auto sol = solve(p, phi, 10, 0.05, 1e-3);
    for (int t = 1; t <= 10; ++t) {
      double want = oracle::logistic_closed_form(c0, p.K, p.r.a, p.r.b, p.r.c, t);
      double got = predict_at(sol, 3, t);
      CHECK(std::abs(got - want) / want < 1e-4);
    }
  }
}

TEST_CASE("random uniform data and rates match the closed form") {
  gen::Rng rng(31337);
  for (int trial = 0; trial < 8; ++trial) {
    DLParams p = reference_params();
    p.K = rng.uniform(10.0, 80.0);
    p.d = rng.uniform(0.0, 0.1);
    p.r = GrowthRate{rng.uniform(0.0, 2.0), rng.uniform(0.1, 2.5), rng.uniform(0.05, 0.5)};
    double c0 = rng.uniform(0.05, 0.95) * p.K;
    auto sol = solve(p, InitialDensity::constant(p.l, p.L, c0), 8, 0.05, 1e-3);
    for (int t = 2; t <= 8; ++t) {
      double want = oracle::logistic_closed_form(c0, p.K, p.r.a, p.r.b, p.r.c, t);
      CHECK(std::abs(predict_at(sol, 2, t) - want) / want < 1e-4);
    }
  }
}

TEST_CASE("pure diffusion conserves trapezoid mass") {
  DLParams p = reference_params();
  p.r = GrowthRate{0.0, 0.0, 0.0};
  p.d = 0.05;
  auto phi = build_initial_density({{1, 2}, {2, 3}, {3, 5}, {4, 8}, {5, 12}});
  auto sol = solve(p, phi, 50, 0.05, 0.01);
  double m0 = trapezoid_mass(sol, 1);
  for (int t = 2; t <= 50; ++t)
    CHECK(std::abs(trapezoid_mass(sol, t) - m0) / m0 < 1e-8);
}

TEST_CASE("initial row equals phi at the grid nodes") {
  auto p = reference_params();
  auto phi = build_initial_density({{1, 1}, {2, 4}, {3, 9}, {4, 16}, {5, 20}});
  auto sol = solve(p, phi, 3, 0.05, 0.01);
  for (std::size_t i = 0; i < sol.nodes; ++i)
    CHECK(sol.at_hour(1)[i] == Catch::Approx(phi.evaluate(sol.x_at(i))).margin(1e-12));
}

TEST_CASE("comparison principle on ordered initial profiles") {
  gen::Rng rng(99);
  auto p = reference_params();
  for (int trial = 0; trial < 6; ++trial) {
    auto samples = gen::admissible_profile(rng, p.K);
    auto phi2 = build_initial_density(samples);
    // the clamped spline is linear in its sample values, so scaling the
    // samples scales the spline pointwise
    auto scaled = samples;
    double factor = rng.uniform(0.3, 0.9);
    for (auto& s : scaled) s.second *= factor;
    auto phi1 = build_initial_density(scaled);
    auto sol1 = solve(p, phi1, 8, 0.05, 0.01);
    auto sol2 = solve(p, phi2, 8, 0.05, 0.01);
    for (int t = 1; t <= 8; ++t) {
      const auto& r1 = sol1.at_hour(t);
      const auto& r2 = sol2.at_hour(t);
      for (std::size_t i = 0; i < r1.size(); ++i) CHECK(r1[i] <= r2[i] + 1e-9 * p.K);
    }
  }
}

TEST_CASE("successive grid refinements converge") {
  auto p = reference_params();
  auto phi = build_initial_density({{1, 2}, {2, 3}, {3, 5}, {4, 8}, {5, 12}});
  auto coarse = solve(p, phi, 6, 0.05, 0.01);
  auto mid = solve(p, phi, 6, 0.025, 0.005);
  auto fine = solve(p, phi, 6, 0.0125, 0.0025);
  double d1 = 0.0, d2 = 0.0;
  for (int x = 1; x <= 5; ++x)
    for (int t = 2; t <= 6; ++t) {
      d1 = std::max(d1, std::abs(predict_at(mid, x, t) - predict_at(coarse, x, t)));
      d2 = std::max(d2, std::abs(predict_at(fine, x, t) - predict_at(mid, x, t)));
    }
  CHECK(d2 < d1);       // refinement shrinks the change
  CHECK(d2 < 4.0 * d1); // and never blows past the first-order envelope
}

TEST_CASE("solver rejects bad resolutions and missing coverage") {
  auto p = reference_params();
  auto phi = build_initial_density({{1, 1}, {3, 4}, {5, 9}});
  CHECK_THROWS_AS(solve(p, phi, 6, 1.0, 0.01), input_error);    // only 4 intervals
  CHECK_THROWS_AS(solve(p, phi, 6, 0.3, 0.01), input_error);    // does not divide evenly
  CHECK_THROWS_AS(solve(p, phi, 6, -0.05, 0.01), input_error);
  CHECK_THROWS_AS(solve(p, phi, 6, 0.05, -0.01), input_error);
  CHECK_THROWS_AS(solve(p, phi, 1, 0.05, 0.01), input_error);   // t_end must exceed 1
  DLParams wide = p;
  wide.L = 7.0;  // phi only covers [1, 5]
  CHECK_THROWS_AS(solve(wide, phi, 6, 0.05, 0.01), input_error);
}

TEST_CASE("instability is detected and names the failing step") {
  DLParams p = reference_params();
  p.r = GrowthRate{0.0, 0.0, 5.0};  // dt * r far beyond the stable range
  auto phi = InitialDensity::constant(p.l, p.L, 20.0);
  CHECK_THROWS_WITH(solve(p, phi, 6, 0.05, 1.0), Catch::Matchers::ContainsSubstring("step"));
}

TEST_CASE("predict_at bounds") {
  auto p = reference_params();
  auto phi = build_initial_density({{1, 1}, {2, 4}, {3, 9}, {4, 16}, {5, 20}});
  auto sol = solve(p, phi, 6, 0.05, 0.01);
  CHECK(predict_at(sol, 2, 1) == Catch::Approx(4.0).margin(1e-12));
  CHECK_THROWS_AS(predict_at(sol, 0, 3), input_error);
  CHECK_THROWS_AS(predict_at(sol, 6, 3), input_error);
  CHECK_THROWS_AS(predict_at(sol, 3, 0), input_error);
  CHECK_THROWS_AS(predict_at(sol, 3, 7), input_error);
}

TEST_CASE("property report on an admissible run") {
  auto p = reference_params();
  auto half = InitialDensity::constant(p.l, p.L, p.K / 2.0);
  auto adm = check_lower_solution(half, p);
  REQUIRE(adm.passed);
  auto sol = solve(p, half, 10, 0.05, 0.01);
  auto rep = verify_properties(sol, adm.passed);
  CHECK(rep.bounds_ok);
  CHECK(rep.monotone_ok);
  CHECK(rep.monotone_expected);
  CHECK(rep.boundary_flux_ok);
  CHECK(rep.all_passed());
  CHECK(rep.max_value <= p.K + 1e-9 * p.K);
  CHECK(rep.min_value >= p.K / 2.0 - 1e-9 * p.K);  // monotone up from K/2
}

TEST_CASE("property report downgrades monotonicity for inadmissible profiles") {
  DLParams p = reference_params();
  p.d = 0.15;                              // diffusion strong enough to pull spikes down
  p.r = GrowthRate{0.0, 0.0, 0.01};
  auto spiky = build_initial_density({{1, 6}, {2, 14}, {3, 6}, {4, 6}, {5, 6}});
  auto adm = check_lower_solution(spiky, p);
  REQUIRE_FALSE(adm.passed);
  auto sol = solve(p, spiky, 6, 0.05, 0.005);
  auto rep = verify_properties(sol, adm.passed);
  CHECK_FALSE(rep.monotone_expected);
  CHECK_FALSE(rep.monotone_ok);  // the spike must relax downward somewhere
  CHECK(rep.bounds_ok);
  CHECK(rep.all_passed());       // informational monotonicity does not fail the report
}

TEST_CASE("zero-profile run is monotone with equality") {
  auto p = reference_params();
  auto sol = solve_on_grid(p, std::vector<double>(81, 0.0), 5, 0.05, 0.01);
  auto rep = verify_properties(sol, true);
  CHECK(rep.monotone_ok);
  CHECK(rep.max_decrease == 0.0);
  CHECK(rep.bounds_ok);
}
