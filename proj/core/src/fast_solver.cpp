#include "pemwe/fast_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "pemwe/errors.hpp"

namespace pemwe {

FastState PeriodTrajectory::state(std::size_t j) const {
  FastState s;
  s.theta1 = theta1.at(j);
  s.c_o2 = c_o2.at(j);
  s.c_h2 = c_h2.at(j);
  const auto first = c_mem.begin() + static_cast<std::ptrdiff_t>(j * membrane_nodes);
  s.c_mem.assign(first, first + static_cast<std::ptrdiff_t>(membrane_nodes));
  return s;
}

void PeriodTrajectory::clear() {
  times.clear();
  potential.clear();
  potential_left.clear();
  theta1.clear();
  c_o2.clear();
  c_h2.clear();
  c_mem.clear();
}

void PeriodTrajectory::push(double s, double e, double e_left, const FastState& state) {
  times.push_back(s);
  potential.push_back(e);
  potential_left.push_back(e_left);
  theta1.push_back(state.theta1);
  c_o2.push_back(state.c_o2);
  c_h2.push_back(state.c_h2);
  c_mem.insert(c_mem.end(), state.c_mem.begin(), state.c_mem.end());
}

CycleNotConverged::CycleNotConverged(CycleResult result)
    : std::runtime_error(fmt::format(
          "limit cycle not reached after {} periods (last periodicity error {:.3e})",
          result.periods_used,
          result.periodicity_errors.empty() ? 0.0 : result.periodicity_errors.back())),
      result_(std::move(result)) {}

FastSolver::FastSolver(ModelParameters params, PhysicalConstants constants,
                       MembraneSystem system, double dk, NewtonControls controls)
    : params_(params),
      constants_(constants),
      system_(std::move(system)),
      dk_(dk),
      // theta1 can sink far below any level that affects dissolution; below
      // 1e-20 its residual is measured absolutely.
      bdf_(controls, {1e-20, 1e-12, 1e-12}),
      cached_potential_(std::numeric_limits<double>::quiet_NaN()) {
  if (!(dk_ > 0.0)) throw DomainError("fast step dk must be > 0");
}

void check_state(const FastState& state) {
  const double tol = kStateTolerance;
  if (!(state.theta1 >= -tol && state.theta1 <= 1.0 + tol) || !(state.c_o2 >= -tol) ||
      !(state.c_h2 >= -tol)) {
    throw StateViolation(fmt::format(
        "inadmissible ACL state: theta1={} c_O2={} c_H2={}", state.theta1, state.c_o2,
        state.c_h2));
  }
  for (std::size_t i = 0; i < state.c_mem.size(); ++i) {
    if (!(state.c_mem[i] >= -tol)) {
      throw StateViolation(
          fmt::format("negative membrane concentration {} at node {}", state.c_mem[i], i));
    }
  }
}

Bdf2StepInfo FastSolver::step(FastState& state, double potential) {
  if (state.c_mem.size() != system_.nodes()) {
    throw DomainError(fmt::format("fast state has {} membrane nodes, expected {}",
                                  state.c_mem.size(), system_.nodes()));
  }
  if (potential != cached_potential_) {
    cached_coeff_ = acl_coefficients(potential, 0.0, params_, constants_);
    cached_c_ccl_ = ccl_boundary_concentration(current_density(potential, params_, constants_),
                                               params_, constants_);
    cached_potential_ = potential;
  }
  AclCoefficients coeff = cached_coeff_;
  coeff.membrane_inflow = membrane_flux(state.c_mem.front(), state.c_h2, params_, constants_);

  AclVector y{state.theta1, state.c_o2, state.c_h2};
  auto system = [&coeff](const Vec<3>& v, Vec<3>& f, Mat<3>& jac) {
    f = acl_rhs(v, coeff);
    jac = acl_jacobian(v, coeff);
  };
  auto admissible = [](const Vec<3>& v) {
    return v[0] >= 0.0 && v[0] <= 1.0 && v[1] >= 0.0 && v[2] >= 0.0;
  };
  const Bdf2StepInfo info = bdf_.step(system, y, dk_, admissible);
  if (info.fell_back) ++fallbacks_;

  state.theta1 = y[0];
  state.c_o2 = y[1];
  state.c_h2 = y[2];

  step_membrane(state.c_mem, dk_, cached_c_ccl_, state.c_h2, system_, workspace_);
  ++steps_;
  check_state(state);
  return info;
}

FastState step_fast(const FastState& state, double dk, double potential,
                    const MembraneSystem& system, const ModelParameters& params,
                    const PhysicalConstants& constants, NewtonControls controls) {
  FastSolver solver(params, constants, system, dk, controls);
  FastState next = state;
  solver.step(next, potential);
  return next;
}

void run_one_period(FastSolver& solver, FastState& state, const OperationProfile& profile,
                    long steps, PeriodTrajectory& out) {
  if (steps < 1) throw DomainError("run_one_period needs at least one step");
  out.clear();
  out.period = profile.period;
  out.membrane_nodes = state.c_mem.size();
  const auto samples = static_cast<std::size_t>(steps) + 1;
  out.times.reserve(samples);
  out.potential.reserve(samples);
  out.potential_left.reserve(samples);
  out.theta1.reserve(samples);
  out.c_o2.reserve(samples);
  out.c_h2.reserve(samples);
  out.c_mem.reserve(samples * out.membrane_nodes);

  solver.reset_history();
  const double n = static_cast<double>(steps);
  out.push(0.0, potential_at_phase(profile, 0.0), potential_left_limit_at_phase(profile, 0.0),
           state);
  for (long j = 1; j <= steps; ++j) {
    const double phase = j == steps ? 0.0 : static_cast<double>(j) / n;
    const double e = potential_at_phase(profile, phase);
    solver.step(state, e);
    const double s = j == steps ? profile.period : profile.period * (static_cast<double>(j) / n);
    out.push(s, e, potential_left_limit_at_phase(profile, phase), state);
  }
}

PeriodRun run_one_period(FastSolver& solver, const FastState& start,
                         const OperationProfile& profile, long steps) {
  PeriodRun run{start, {}};
  run_one_period(solver, run.end_state, profile, steps, run.trajectory);
  return run;
}

double periodicity_error(const FastState& a, const FastState& b) {
  auto component = [](double x, double y) { return std::abs(x - y) / (1.0 + std::abs(x)); };
  return std::max({component(a.theta1, b.theta1), component(a.c_o2, b.c_o2),
                   component(a.c_h2, b.c_h2)});
}

CycleResult find_limit_cycle(FastSolver& solver, const FastState& start,
                             const OperationProfile& profile, const MultiscaleConfig& config) {
  const long steps = config.steps_per_period();
  CycleResult result;
  FastState state = start;
  for (int n = 1; n <= config.max_periods; ++n) {
    const FastState period_start = state;
    run_one_period(solver, state, profile, steps, result.trajectory);
    const double err = periodicity_error(period_start, state);
    result.periodicity_errors.push_back(err);
    result.periods_used = n;
    if (err < config.tolp) {
      result.converged = true;
      break;
    }
  }
  result.end_state = std::move(state);
  if (!result.converged) throw CycleNotConverged(std::move(result));
  return result;
}

}  // namespace pemwe
