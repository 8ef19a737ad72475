#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pemwe/errors.hpp"
#include "pemwe/multiscale.hpp"
#include "order_oracles.hpp"
#include "test_support.hpp"

using namespace pemwe;
using pemwe::testing::default_setup;
using pemwe::testing::desk_setup;

namespace {

// Synthetic smooth cycle: theta1(s) = 0.5 + 0.3 sin(2 pi s / P) on m steps.
PeriodTrajectory synthetic_cycle(const OperationProfile& profile, long m,
                                 double (*theta)(double) = nullptr) {
  PeriodTrajectory tr;
  tr.period = profile.period;
  for (long j = 0; j <= m; ++j) {
    const double phase = static_cast<double>(j) / m;
    const double s = phase * profile.period;
    const double th = theta ? theta(phase) : 0.5 + 0.3 * std::sin(2 * std::numbers::pi * phase);
    tr.push(s, potential_at_phase(profile, j == m ? 0.0 : phase),
            potential_left_limit_at_phase(profile, j == m ? 0.0 : phase), {th, 0.0, 0.0, {}});
  }
  return tr;
}

double rate_oracle(double theta, double e, const SimulationSetup& s) {
  const double f = 96485.0 / (s.constants.gas_constant * s.constants.temperature);
  const double area = ecsa_and_radius(s.n_ir0, s.params, s.constants).area;
  return -(area / s.params.a_geo) * (theta * s.params.k_diss1 + (1 - theta) * s.params.k_diss2) *
         std::exp(f * e);
}

// Composite Simpson on [a, b] of g(phase).
template <class G>
double simpson(G g, double a, double b, int n) {
  const double h = (b - a) / n;
  double sum = g(a) + g(b);
  for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * g(a + i * h);
  return sum * h / 3.0;
}

}  // namespace

TEST_CASE("cycle average of a constant integrand is that constant") {
  auto s = desk_setup(ProfileShape::hold);
  const auto tr = synthetic_cycle(s.profile, 6000, [](double) { return 0.37; });
  const double want = rate_oracle(0.37, s.profile.e_max, s);
  CHECK(std::abs(average_slow_rhs(tr, s.n_ir0, s.params, s.constants) - want) <=
        1e-12 * std::abs(want));
}

TEST_CASE("square-wave jumps are integrated on the correct side") {
  auto s = desk_setup(ProfileShape::square);
  for (long m : {2L, 10L, 6000L}) {
    const auto tr = synthetic_cycle(s.profile, m, [](double) { return 0.2; });
    const double want =
        0.5 * (rate_oracle(0.2, s.profile.e_max, s) + rate_oracle(0.2, s.profile.e_min, s));
    CHECK(std::abs(average_slow_rhs(tr, s.n_ir0, s.params, s.constants) - want) <=
          1e-12 * std::abs(want));
  }
}

TEST_CASE("trapezoid average agrees with Simpson on a smooth synthetic cycle") {
  for (ProfileShape shape : {ProfileShape::hold, ProfileShape::triangle,
                             ProfileShape::sawtooth_up, ProfileShape::sawtooth_down}) {
    auto s = desk_setup(shape);
    const auto tr = synthetic_cycle(s.profile, 6000);
    auto g = [&](double phase) {
      return rate_oracle(0.5 + 0.3 * std::sin(2 * std::numbers::pi * phase),
                         potential_at_phase(s.profile, std::min(phase, 1.0 - 1e-16)), s);
    };
    // Split at the triangle's apex so each panel is smooth.
    const double ref = simpson(g, 0.0, 0.5, 2000) + simpson(g, 0.5, 1.0, 2000);
    const double got = average_slow_rhs(tr, s.n_ir0, s.params, s.constants);
    CAPTURE(to_string(shape));
    CHECK(std::abs(got - ref) <= 1e-6 * std::abs(ref));
  }
}

TEST_CASE("cycle average is linear in the dissolution constants") {
  auto s = desk_setup(ProfileShape::triangle);
  const auto tr = synthetic_cycle(s.profile, 600);
  const double base = average_slow_rhs(tr, s.n_ir0, s.params, s.constants);
  for (double delta : {1e-3, 0.5, 7.0, 1e4}) {
    auto p = s.params;
    p.k_diss1 *= delta;
    p.k_diss2 *= delta;
    CHECK(average_slow_rhs(tr, s.n_ir0, p, s.constants) ==
          doctest::Approx(delta * base).epsilon(1e-13));
  }
}

TEST_CASE("cycle span is checked") {
  auto s = desk_setup(ProfileShape::hold);
  auto tr = synthetic_cycle(s.profile, 100);
  tr.times.back() = 59.0;
  CHECK_THROWS_AS(average_slow_rhs(tr, s.n_ir0, s.params, s.constants), DomainError);
  PeriodTrajectory empty;
  CHECK_THROWS_AS(average_slow_rhs(empty, s.n_ir0, s.params, s.constants), DomainError);
}

TEST_CASE("slow update formulas") {
  CHECK(advance_slow(1.0, -0.1, std::nullopt, 2.0) == doctest::Approx(0.8));
  CHECK(advance_slow(1.0, -0.1, -0.2, 2.0) == doctest::Approx(1.0 + 2.0 * (-0.15 + 0.1)));
  CHECK_THROWS_AS(advance_slow(1.0, -1.0, std::nullopt, 1.0), DepletionError);
  CHECK_THROWS_AS(advance_slow(0.0, -1.0, std::nullopt, 1.0), DomainError);
}

TEST_CASE("Adams-Bashforth 2 convergence order") {
  CHECK(pemwe::testing::ab2_orders().min() >= 1.9);
}

TEST_CASE("multiscale run on the desk scale") {
  auto s = desk_setup(ProfileShape::square);
  std::vector<CycleResult> cycles;
  MultiscaleOptions opt;
  opt.on_cycle = [&](long, const CycleResult& c) { cycles.push_back(c); };
  const auto tr = run_multiscale(s.multiscale, s.profile, s.params, s.constants, {s.n_ir0}, opt);
  REQUIRE(tr.steps.size() == 13);
  CHECK(tr.steps.front().n_ir == s.n_ir0);
  CHECK(tr.steps.back().t_s == 7200.0);
  CHECK(std::isnan(tr.steps.back().avg_rate));
  for (std::size_t k = 1; k < tr.steps.size(); ++k) {
    CHECK(tr.steps[k].n_ir < tr.steps[k - 1].n_ir);
    CHECK(tr.steps[k].t_s == doctest::Approx(600.0 * k));
  }
  REQUIRE(cycles.size() == 12);
  for (std::size_t k = 0; k < cycles.size(); ++k) {
    CHECK(cycles[k].converged);
    CHECK(tr.steps[k].periods_used == cycles[k].periods_used);
    CHECK(tr.steps[k].periodicity_error < s.multiscale.tolp);
    if (k > 0) CHECK(cycles[k].periods_used <= 5);
  }
  CHECK(tr.nonconverged_cycles == 0);
  long periods = 0;
  for (const auto& c : cycles) periods += c.periods_used;
  CHECK(tr.fast_steps == periods * 6000);
}

TEST_CASE("warm and cold starts give the same inventory") {
  auto s = desk_setup(ProfileShape::triangle);
  s.multiscale.horizon = 1800.0;
  MultiscaleOptions cold;
  cold.warm_start = false;
  const auto a = run_multiscale(s.multiscale, s.profile, s.params, s.constants, {s.n_ir0});
  const auto b = run_multiscale(s.multiscale, s.profile, s.params, s.constants, {s.n_ir0}, cold);
  REQUIRE(a.steps.size() == b.steps.size());
  for (std::size_t k = 0; k < a.steps.size(); ++k) {
    CHECK(a.steps[k].n_ir == doctest::Approx(b.steps[k].n_ir).epsilon(1e-9));
  }
  CHECK(a.fast_steps < b.fast_steps);
}

TEST_CASE("zero dissolution keeps the inventory") {
  auto s = desk_setup(ProfileShape::sawtooth_up);
  s.multiscale.horizon = 1200.0;
  s.params.k_diss1 = 0.0;
  s.params.k_diss2 = 0.0;
  const auto tr = run_multiscale(s.multiscale, s.profile, s.params, s.constants, {s.n_ir0});
  for (const auto& row : tr.steps) CHECK(row.n_ir == s.n_ir0);
}

TEST_CASE("depletion stops the run") {
  auto s = desk_setup(ProfileShape::hold);
  s.params.k_diss2 *= 1e3;
  const auto tr = run_multiscale(s.multiscale, s.profile, s.params, s.constants, {s.n_ir0});
  REQUIRE(tr.depleted_at.has_value());
  CHECK(*tr.depleted_at == tr.steps.back().t_s + 600.0);
  CHECK(tr.steps.size() < 13);
}

TEST_CASE("non-convergence policy") {
  auto s = desk_setup(ProfileShape::square);
  s.multiscale.horizon = 1200.0;
  s.multiscale.max_periods = 1;
  const auto tr = run_multiscale(s.multiscale, s.profile, s.params, s.constants, {s.n_ir0});
  CHECK(tr.nonconverged_cycles >= 1);
  CHECK_FALSE(tr.steps.front().cycle_converged);
  CHECK(tr.steps.front().periods_used == 1);
  s.multiscale.on_nonconvergence = NonConvergencePolicy::abort;
  CHECK_THROWS_AS(run_multiscale(s.multiscale, s.profile, s.params, s.constants, {s.n_ir0}),
                  CycleNotConverged);
}

TEST_CASE("multiscale runs are bitwise deterministic") {
  auto s = desk_setup(ProfileShape::sawtooth_down);
  s.multiscale.horizon = 1800.0;
  const auto a = run_multiscale(s.multiscale, s.profile, s.params, s.constants, {s.n_ir0});
  const auto b = run_multiscale(s.multiscale, s.profile, s.params, s.constants, {s.n_ir0});
  REQUIRE(a.steps.size() == b.steps.size());
  for (std::size_t k = 0; k < a.steps.size(); ++k) CHECK(a.steps[k].n_ir == b.steps[k].n_ir);
}
