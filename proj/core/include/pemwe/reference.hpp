#pragma once

// Fully-resolved integration: every fast step of the whole horizon, with the
// iridium inventory advanced alongside by explicit Euler at dk.

#include <optional>
#include <vector>

#include "pemwe/fast_solver.hpp"
#include "pemwe/model.hpp"
#include "pemwe/multiscale.hpp"

namespace pemwe {

struct FullTrajectory {
  long stride = 0;  // fast steps between stored samples
  double dk = 0.0;
  double n_ir0 = 0.0;
  std::size_t membrane_nodes = 0;
  std::vector<double> times;  // s
  std::vector<double> potential;
  std::vector<double> theta1;
  std::vector<double> c_o2;
  std::vector<double> c_h2;
  std::vector<double> c_mem;  // row-major (sample, node)
  std::vector<double> n_ir;
  std::optional<double> depleted_at;
  long fast_steps = 0;
  long bdf_fallbacks = 0;

  std::size_t size() const { return times.size(); }
};

// Number of fast steps covering `horizon`. Throws DomainError unless the
// horizon is a positive integer multiple of dk (relative tolerance 1e-9).
long fast_steps_for_horizon(double horizon, double dk);

struct ReferenceOptions {
  long stride = 0;  // 0 selects one sample per period
};

// Runs config.horizon seconds. The slow update over [t_j, t_j+1] uses the
// state and right-continuous potential at t_j. Stops cleanly and records
// depleted_at if the inventory is exhausted.
FullTrajectory run_fully_resolved(const MultiscaleConfig& config, const OperationProfile& profile,
                                  const ModelParameters& params,
                                  const PhysicalConstants& constants, const SlowState& initial,
                                  const ReferenceOptions& options = {});

// Normalized inventory n(t)/n(0) on its own time grid.
struct NormalizedSeries {
  std::vector<double> times;   // s
  std::vector<double> values;
};

NormalizedSeries normalized_series(const SlowTrajectory& trajectory);
NormalizedSeries normalized_series(const FullTrajectory& trajectory);

struct Comparison {
  double mse = 0.0;
  double max_abs = 0.0;
  std::size_t points = 0;
  std::vector<double> times;
  std::vector<double> a;
  std::vector<double> b;  // b interpolated to a's times
};

// b is linearly interpolated to the times of a that fall inside b's range.
// Throws DomainError when no time of a lies in that range.
Comparison compare_detailed(const NormalizedSeries& a, const NormalizedSeries& b);
double compare_trajectories(const NormalizedSeries& a, const NormalizedSeries& b);

// Piecewise-linear interpolation on a strictly increasing grid; x must lie
// within [xs.front(), xs.back()].
double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x);

}  // namespace pemwe
