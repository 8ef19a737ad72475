#include "pemwe/multiscale.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "pemwe/errors.hpp"
#include "pemwe/membrane.hpp"

namespace pemwe {

double average_slow_rhs(const PeriodTrajectory& cycle, double n_ir,
                        const ModelParameters& params, const PhysicalConstants& constants) {
  const std::size_t n = cycle.size();
  if (n < 2 || cycle.theta1.size() != n || cycle.potential.size() != n ||
      cycle.potential_left.size() != n) {
    throw DomainError("average_slow_rhs: cycle needs at least two consistent samples");
  }
  const double period = cycle.period;
  if (!(period > 0.0) || cycle.times.front() != 0.0 ||
      std::abs(cycle.times.back() - period) > 1e-9 * period) {
    throw DomainError(fmt::format("average_slow_rhs: cycle spans [{}, {}], expected [0, {}]",
                                  cycle.times.front(), cycle.times.back(), period));
  }
  const double f = constants.f();
  auto integrand = [&](double theta, double e) {
    return (theta * params.k_diss1 + (1.0 - theta) * params.k_diss2) * std::exp(f * e);
  };
  double sum = 0.0;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double h = cycle.times[j + 1] - cycle.times[j];
    sum += 0.5 * h *
           (integrand(cycle.theta1[j], cycle.potential[j]) +
            integrand(cycle.theta1[j + 1], cycle.potential_left[j + 1]));
  }
  const double area = ecsa_and_radius(n_ir, params, constants).area;
  return -(area / params.a_geo) * sum / period;
}

double advance_slow(double n_k, double rate_k, std::optional<double> rate_prev, double dK) {
  if (!(n_k > 0.0) || !(dK > 0.0)) {
    throw DomainError(fmt::format("advance_slow needs n_k > 0 and dK > 0 (got {}, {})", n_k, dK));
  }
  const double slope = rate_prev ? 1.5 * rate_k - 0.5 * *rate_prev : rate_k;
  const double next = n_k + dK * slope;
  if (!(next > 0.0)) {
    throw DepletionError(fmt::format("iridium inventory exhausted ({} mol)", next),
                         std::numeric_limits<double>::quiet_NaN());
  }
  return next;
}

SlowTrajectory run_multiscale(const MultiscaleConfig& config, const OperationProfile& profile,
                              const ModelParameters& params, const PhysicalConstants& constants,
                              const SlowState& initial, const MultiscaleOptions& options) {
  config.validate();
  profile.validate();
  params.validate();
  constants.validate();
  if (std::abs(profile.period - config.period) > 1e-12 * config.period) {
    throw DomainError(fmt::format("profile period {} differs from config period {}",
                                  profile.period, config.period));
  }
  if (!(initial.n_ir > 0.0)) throw DomainError("initial n_ir must be > 0");

  const MembraneSystem system = MembraneSystem::assemble(params, constants, config.n_elements);
  FastSolver solver(params, constants, system, config.dk,
                    {config.newton_tol, config.newton_max_iter});
  const long macro_steps = config.macro_steps();
  const FastState cold = initial_fast_state(system.nodes());

  SlowTrajectory out;
  out.n_ir0 = initial.n_ir;
  out.steps.reserve(static_cast<std::size_t>(macro_steps) + 1);

  FastState fast = cold;
  double n_ir = initial.n_ir;
  std::optional<double> rate_prev;
  for (long k = 0; k < macro_steps; ++k) {
    const double t = static_cast<double>(k) * config.dK;
    CycleResult cycle;
    try {
      cycle = find_limit_cycle(solver, options.warm_start ? fast : cold, profile, config);
    } catch (CycleNotConverged& e) {
      if (config.on_nonconvergence == NonConvergencePolicy::abort) throw;
      cycle = std::move(e.result());
      ++out.nonconverged_cycles;
    }
    if (options.on_cycle) options.on_cycle(k, cycle);

    const double rate = average_slow_rhs(cycle.trajectory, n_ir, params, constants);
    out.steps.push_back({t, n_ir, rate, cycle.periods_used, cycle.periodicity_errors.back(),
                         cycle.converged});
    fast = std::move(cycle.end_state);
    try {
      n_ir = advance_slow(n_ir, rate, rate_prev, config.dK);
    } catch (const DepletionError&) {
      out.depleted_at = t + config.dK;
      break;
    }
    rate_prev = rate;
  }
  if (!out.depleted_at) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.steps.push_back(
        {static_cast<double>(macro_steps) * config.dK, n_ir, nan, 0, nan, true});
  }
  out.fast_steps = solver.steps_taken();
  out.bdf_fallbacks = solver.fallback_steps();
  return out;
}

}  // namespace pemwe
