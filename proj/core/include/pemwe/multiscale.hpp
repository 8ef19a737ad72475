#pragma once

// Temporal multiscale driver. Each macro step freezes the iridium inventory,
// finds the fast limit cycle, averages the dissolution rate over that cycle
// and advances the inventory with Adams-Bashforth 2.

#include <functional>
#include <optional>
#include <vector>

#include "pemwe/fast_solver.hpp"
#include "pemwe/model.hpp"

namespace pemwe {

// (1/P) * integral of dissolution_rate over one sampled period, trapezoidal
// rule. Interval [s_j, s_j+1] uses E(s_j) at its left end and the left limit
// E(s_j+1^-) at its right end, so jumps are integrated on the correct side.
// Throws DomainError unless the cycle starts at 0 and ends at its period.
double average_slow_rhs(const PeriodTrajectory& cycle, double n_ir,
                        const ModelParameters& params, const PhysicalConstants& constants);

// AB2 update, forward Euler when rate_prev is empty. Throws DepletionError
// (with time_s = NaN) when the result is not positive.
double advance_slow(double n_k, double rate_k, std::optional<double> rate_prev, double dK);

struct MacroStep {
  double t_s = 0.0;
  double n_ir = 0.0;
  double avg_rate = 0.0;  // mol/s; NaN on the final row
  int periods_used = 0;
  double periodicity_error = 0.0;  // last period's error; NaN on the final row
  bool cycle_converged = true;
};

struct SlowTrajectory {
  std::vector<MacroStep> steps;  // one row per macro time, including the end
  double n_ir0 = 0.0;
  std::optional<double> depleted_at;  // s
  long fast_steps = 0;
  long nonconverged_cycles = 0;
  long bdf_fallbacks = 0;
};

struct MultiscaleOptions {
  bool warm_start = true;
  // Called after every limit-cycle search with the macro index.
  std::function<void(long, const CycleResult&)> on_cycle;
};

SlowTrajectory run_multiscale(const MultiscaleConfig& config, const OperationProfile& profile,
                              const ModelParameters& params, const PhysicalConstants& constants,
                              const SlowState& initial, const MultiscaleOptions& options = {});

}  // namespace pemwe
