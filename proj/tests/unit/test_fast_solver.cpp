#include <doctest.h>

#include <cmath>

#include "pemwe/errors.hpp"
#include "pemwe/fast_solver.hpp"
#include "test_support.hpp"

using namespace pemwe;
using pemwe::testing::default_setup;

namespace {

FastSolver make_solver(const SimulationSetup& s) {
  const auto sys = MembraneSystem::assemble(s.params, s.constants, s.multiscale.n_elements);
  return FastSolver(s.params, s.constants, sys, s.multiscale.dk,
                    {s.multiscale.newton_tol, s.multiscale.newton_max_iter});
}

}  // namespace

TEST_CASE("one period records both endpoints") {
  auto s = default_setup();
  s.profile.shape = ProfileShape::square;
  auto solver = make_solver(s);
  const auto run = run_one_period(solver, initial_fast_state(solver.system().nodes()), s.profile,
                                  s.multiscale.steps_per_period());
  const auto& tr = run.trajectory;
  REQUIRE(tr.size() == 6001);
  CHECK(tr.times.front() == 0.0);
  CHECK(tr.times.back() == doctest::Approx(60.0).epsilon(1e-15));
  CHECK(tr.potential[0] == 1.65);
  CHECK(tr.potential[3000] == 1.45);
  CHECK(tr.potential_left[3000] == 1.65);
  CHECK(tr.potential_left[6000] == 1.45);
  CHECK(tr.potential[6000] == 1.65);  // wrapped phase
  CHECK(tr.c_mem.size() == tr.size() * tr.membrane_nodes);
  const auto last = tr.state(tr.size() - 1);
  CHECK(last.theta1 == run.end_state.theta1);
  CHECK(last.c_mem == run.end_state.c_mem);
  CHECK(solver.steps_taken() == 6000);
}

TEST_CASE("first solver step equals the stand-alone BDF1 step") {
  const auto s = default_setup();
  auto solver = make_solver(s);
  FastState a = initial_fast_state(solver.system().nodes());
  const FastState b = step_fast(a, s.multiscale.dk, 1.65, solver.system(), s.params, s.constants,
                                {s.multiscale.newton_tol, s.multiscale.newton_max_iter});
  const auto info = solver.step(a, 1.65);
  CHECK(info.used_bdf1);
  CHECK(a.theta1 == b.theta1);
  CHECK(a.c_o2 == b.c_o2);
  CHECK(a.c_h2 == b.c_h2);
  CHECK(a.c_mem == b.c_mem);
}

TEST_CASE("state checks") {
  FastState st{0.5, 1.0, 1.0, {0.0, 1.0}};
  CHECK_NOTHROW(check_state(st));
  st.theta1 = 1.0 + 5e-10;
  CHECK_NOTHROW(check_state(st));
  st.theta1 = 1.0 + 1e-8;
  CHECK_THROWS_AS(check_state(st), StateViolation);
  st.theta1 = 0.5;
  st.c_mem[0] = -1e-8;
  CHECK_THROWS_AS(check_state(st), StateViolation);
  st.c_mem[0] = 0.0;
  st.c_h2 = -1e-8;
  CHECK_THROWS_AS(check_state(st), StateViolation);
}

TEST_CASE("periodicity error") {
  FastState a{0.5, 10.0, 2.0, {}};
  FastState b = a;
  CHECK(periodicity_error(a, b) == 0.0);
  b.c_o2 = 10.5;
  CHECK(periodicity_error(a, b) == doctest::Approx(0.5 / 11.0));
  b = a;
  b.c_mem = {100.0};  // membrane excluded
  CHECK(periodicity_error(a, b) == 0.0);
}

TEST_CASE("hold profile relaxes to the analytic steady state") {
  const auto s = default_setup();
  auto solver = make_solver(s);
  FastState st = initial_fast_state(solver.system().nodes());
  PeriodTrajectory scratch;
  for (int p = 0; p < 15; ++p) {
    run_one_period(solver, st, s.profile, s.multiscale.steps_per_period(), scratch);
  }
  // Steady balances: O2 leaves at i/(4F), H2 at the steady membrane flux,
  // and the total pressure drives the combined outflow.
  const auto& p = s.params;
  const double rt = s.constants.gas_constant * s.constants.temperature;
  const double f = 96485.0 / rt;
  const double i = p.i0 * std::exp(p.alpha * f * (1.65 - p.e_rev));
  const double c_ccl = (i / (2 * 96485.0) + p.k_l * p.c_henry) / (p.k_l + p.d_eff / p.delta_mem);
  const double robin = p.k_mem * rt;
  double c_h2 = 0.0;
  double c_o2 = 0.0;
  for (int it = 0; it < 100; ++it) {
    const double c0 = (c_ccl + robin * p.delta_mem * c_h2 / p.d_eff) /
                      (1.0 + robin * p.delta_mem / p.d_eff);
    const double f_mem = robin * (c0 - c_h2);
    const double f_o2 = i / (4 * 96485.0);
    const double total = s.constants.atmospheric_pressure + (f_o2 + f_mem) / p.k_acl;
    c_o2 = total * f_o2 / (f_o2 + f_mem) / rt;
    c_h2 = total * f_mem / (f_o2 + f_mem) / rt;
  }
  CHECK(st.c_o2 == doctest::Approx(c_o2).epsilon(1e-6));
  CHECK(st.c_h2 == doctest::Approx(c_h2).epsilon(1e-4));
  // Calibrated default: steady H2 partial pressure of half a bar.
  CHECK(c_h2 * rt == doctest::Approx(5e4).epsilon(1e-3));
  const double red = 2 * p.k_r * rt * c_h2;
  const double ox = p.k_diss1 * std::exp(f * 1.65) / s.constants.site_density;
  // red (1 - th)^2 = ox th, smaller root.
  const double theta = ((2 * red + ox) - std::sqrt((2 * red + ox) * (2 * red + ox) - 4 * red * red)) /
                       (2 * red);
  CHECK(st.theta1 == doctest::Approx(theta).epsilon(1e-4));
}

TEST_CASE("square-wave cold start reaches the limit cycle") {
  auto s = default_setup();
  s.profile.shape = ProfileShape::square;
  s.multiscale.tolp = 1e-6;
  s.multiscale.max_periods = 200;
  auto solver = make_solver(s);
  const auto cycle = find_limit_cycle(solver, initial_fast_state(solver.system().nodes()),
                                      s.profile, s.multiscale);
  CHECK(cycle.converged);
  CHECK(cycle.periods_used <= 200);
  CHECK(cycle.periodicity_errors.back() < 1e-6);
  CHECK(cycle.trajectory.size() == 6001);
  // Warm restart from the converged state needs a single period.
  const auto again = find_limit_cycle(solver, cycle.end_state, s.profile, s.multiscale);
  CHECK(again.periods_used <= 5);
}

TEST_CASE("hold-profile periodicity errors do not increase after the first period") {
  auto s = default_setup();
  s.multiscale.tolp = 1e-12;
  s.multiscale.max_periods = 12;
  auto solver = make_solver(s);
  std::vector<double> errors;
  try {
    errors = find_limit_cycle(solver, initial_fast_state(solver.system().nodes()), s.profile,
                              s.multiscale)
                 .periodicity_errors;
  } catch (const CycleNotConverged& e) {
    errors = e.result().periodicity_errors;
  }
  REQUIRE(errors.size() >= 3);
  for (std::size_t i = 2; i < errors.size(); ++i) CHECK(errors[i] <= errors[i - 1]);
}

TEST_CASE("exhausted search reports the error sequence") {
  auto s = default_setup();
  s.profile.shape = ProfileShape::square;
  s.multiscale.max_periods = 2;
  auto solver = make_solver(s);
  try {
    find_limit_cycle(solver, initial_fast_state(solver.system().nodes()), s.profile,
                     s.multiscale);
    FAIL("expected CycleNotConverged");
  } catch (const CycleNotConverged& e) {
    CHECK_FALSE(e.result().converged);
    CHECK(e.result().periods_used == 2);
    CHECK(e.result().periodicity_errors.size() == 2);
  }
}

TEST_CASE("fast runs are deterministic") {
  auto s = default_setup();
  s.profile.shape = ProfileShape::triangle;
  auto a = make_solver(s);
  auto b = make_solver(s);
  const auto ra = run_one_period(a, initial_fast_state(a.system().nodes()), s.profile, 6000);
  const auto rb = run_one_period(b, initial_fast_state(b.system().nodes()), s.profile, 6000);
  CHECK(ra.trajectory.theta1 == rb.trajectory.theta1);
  CHECK(ra.trajectory.c_h2 == rb.trajectory.c_h2);
  CHECK(ra.trajectory.c_mem == rb.trajectory.c_mem);
}

TEST_CASE("very fast oxidation does not stall Newton") {
  // theta1 collapses to ~1e-21 while its balance is a difference of ~1e-14
  // terms; the iteration must still terminate.
  auto s = default_setup();
  s.params.k_diss1 *= 1e6;
  auto solver = make_solver(s);
  FastState st = initial_fast_state(solver.system().nodes());
  PeriodTrajectory tr;
  CHECK_NOTHROW(run_one_period(solver, st, s.profile, 6000, tr));
  CHECK(st.theta1 >= 0.0);
  CHECK(st.theta1 < 1e-15);
}
