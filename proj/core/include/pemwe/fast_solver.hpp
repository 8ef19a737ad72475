#pragma once

// Fast-scale integration with the slow inventory frozen: BDF2 on the three
// ACL equations, semi-implicitly coupled to a backward-Euler membrane step,
// plus the period-to-period limit-cycle search.

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "pemwe/bdf2.hpp"
#include "pemwe/membrane.hpp"
#include "pemwe/model.hpp"

namespace pemwe {

// Samples of one forcing period, j = 0 .. steps. Membrane values are stored
// row-major (sample, node).
struct PeriodTrajectory {
  double period = 0.0;
  std::size_t membrane_nodes = 0;
  std::vector<double> times;           // s since the period start
  std::vector<double> potential;       // E(s), right value
  std::vector<double> potential_left;  // E(s^-), differs only at jumps
  std::vector<double> theta1;
  std::vector<double> c_o2;
  std::vector<double> c_h2;
  std::vector<double> c_mem;

  std::size_t size() const { return times.size(); }
  FastState state(std::size_t j) const;
  void clear();
  void push(double s, double e, double e_left, const FastState& state);
};

struct CycleResult {
  bool converged = false;
  int periods_used = 0;
  PeriodTrajectory trajectory;  // the last full period
  std::vector<double> periodicity_errors;
  FastState end_state;
};

// The limit-cycle search exhausted max_periods. Carries the full result so
// the caller can accept the last period or abort.
class CycleNotConverged : public std::runtime_error {
 public:
  explicit CycleNotConverged(CycleResult result);
  const CycleResult& result() const noexcept { return result_; }
  CycleResult& result() noexcept { return result_; }

 private:
  CycleResult result_;
};

// Violation tolerance for theta1 in [0, 1] and non-negative concentrations.
inline constexpr double kStateTolerance = 1e-9;

// Owns the BDF history and scratch space; one instance per concurrent run.
class FastSolver {
 public:
  FastSolver(ModelParameters params, PhysicalConstants constants, MembraneSystem system,
             double dk, NewtonControls controls);

  // One coupled step to the new time level at which the potential is
  // `potential`: (a) BDF2 (BDF1 on startup) on the ACL block with the
  // membrane field frozen at its start-of-step values in the inflow term,
  // (b) one backward-Euler membrane step using the new ACL H2 concentration.
  // Throws StepFailure or StateViolation.
  Bdf2StepInfo step(FastState& state, double potential);

  void reset_history() { bdf_.reset(); }
  double dk() const { return dk_; }
  long steps_taken() const { return steps_; }
  long fallback_steps() const { return fallbacks_; }
  const ModelParameters& params() const { return params_; }
  const PhysicalConstants& constants() const { return constants_; }
  const MembraneSystem& system() const { return system_; }

 private:
  ModelParameters params_;
  PhysicalConstants constants_;
  MembraneSystem system_;
  double dk_;
  Bdf2<3> bdf_;
  MembraneWorkspace workspace_;
  // Potential-dependent coefficients of the last step; hold and square
  // profiles repeat the same potential for many steps.
  double cached_potential_;
  AclCoefficients cached_coeff_;
  double cached_c_ccl_ = 0.0;
  long steps_ = 0;
  long fallbacks_ = 0;
};

// Single self-starting (BDF1) coupled step without history.
FastState step_fast(const FastState& state, double dk, double potential,
                    const MembraneSystem& system, const ModelParameters& params,
                    const PhysicalConstants& constants, NewtonControls controls = {});

// Throws StateViolation if theta1 leaves [0, 1] or any concentration drops
// below zero by more than kStateTolerance.
void check_state(const FastState& state);

struct PeriodRun {
  FastState end_state;
  PeriodTrajectory trajectory;
};

// Applies `steps` fast steps over one period, restarting BDF with BDF1, and
// records every sample including both endpoints.
PeriodRun run_one_period(FastSolver& solver, const FastState& start,
                         const OperationProfile& profile, long steps);
void run_one_period(FastSolver& solver, FastState& state, const OperationProfile& profile,
                    long steps, PeriodTrajectory& out);

// max over (theta1, c_O2, c_H2) of |a - b| / (1 + |a|). Membrane excluded.
double periodicity_error(const FastState& a, const FastState& b);

// Repeats periods until the period-start states agree within tolp. Throws
// CycleNotConverged after max_periods.
CycleResult find_limit_cycle(FastSolver& solver, const FastState& start,
                             const OperationProfile& profile, const MultiscaleConfig& config);

}  // namespace pemwe
