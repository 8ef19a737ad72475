#include "pemwe/reference.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "pemwe/errors.hpp"
#include "pemwe/membrane.hpp"

namespace pemwe {

long fast_steps_for_horizon(double horizon, double dk) {
  const double ratio = horizon / dk;
  const double rounded = std::round(ratio);
  if (!(rounded >= 1.0) || std::abs(ratio - rounded) > 1e-9 * rounded) {
    throw DomainError(fmt::format("horizon {} s is not a multiple of dk {} s", horizon, dk));
  }
  return static_cast<long>(rounded);
}

namespace {

void store(FullTrajectory& out, double t, double e, const FastState& s, double n_ir) {
  out.times.push_back(t);
  out.potential.push_back(e);
  out.theta1.push_back(s.theta1);
  out.c_o2.push_back(s.c_o2);
  out.c_h2.push_back(s.c_h2);
  out.c_mem.insert(out.c_mem.end(), s.c_mem.begin(), s.c_mem.end());
  out.n_ir.push_back(n_ir);
}

}  // namespace

FullTrajectory run_fully_resolved(const MultiscaleConfig& config, const OperationProfile& profile,
                                  const ModelParameters& params,
                                  const PhysicalConstants& constants, const SlowState& initial,
                                  const ReferenceOptions& options) {
  config.validate_fast();
  profile.validate();
  params.validate();
  constants.validate();
  if (std::abs(profile.period - config.period) > 1e-12 * config.period) {
    throw DomainError(fmt::format("profile period {} differs from config period {}",
                                  profile.period, config.period));
  }
  if (!(initial.n_ir > 0.0)) throw DomainError("initial n_ir must be > 0");
  if (options.stride < 0) throw DomainError("stride must be >= 0");

  const long per_period = config.steps_per_period();
  const long total = fast_steps_for_horizon(config.horizon, config.dk);
  const MembraneSystem system = MembraneSystem::assemble(params, constants, config.n_elements);
  FastSolver solver(params, constants, system, config.dk,
                    {config.newton_tol, config.newton_max_iter});

  FullTrajectory out;
  out.stride = options.stride > 0 ? options.stride : per_period;
  out.dk = config.dk;
  out.n_ir0 = initial.n_ir;
  out.membrane_nodes = system.nodes();
  const auto reserve = static_cast<std::size_t>(total / out.stride + 2);
  out.times.reserve(reserve);
  out.n_ir.reserve(reserve);

  auto potential = [&](long j) {
    return potential_at_phase(profile, static_cast<double>(j % per_period) /
                                           static_cast<double>(per_period));
  };

  FastState state = initial_fast_state(system.nodes());
  double n_ir = initial.n_ir;
  double e = potential(0);
  store(out, 0.0, e, state, n_ir);
  for (long j = 0; j < total; ++j) {
    const double rate = dissolution_rate(state.theta1, e, n_ir, params, constants);
    const double e_next = potential(j + 1);
    solver.step(state, e_next);
    const double n_next = n_ir + config.dk * rate;
    const double t_next = static_cast<double>(j + 1) * config.dk;
    if (!(n_next > 0.0)) {
      out.depleted_at = t_next;
      break;
    }
    n_ir = n_next;
    e = e_next;
    if ((j + 1) % out.stride == 0 || j + 1 == total) store(out, t_next, e, state, n_ir);
  }
  out.fast_steps = solver.steps_taken();
  out.bdf_fallbacks = solver.fallback_steps();
  return out;
}

NormalizedSeries normalized_series(const SlowTrajectory& trajectory) {
  NormalizedSeries s;
  for (const auto& row : trajectory.steps) {
    s.times.push_back(row.t_s);
    s.values.push_back(row.n_ir / trajectory.n_ir0);
  }
  return s;
}

NormalizedSeries normalized_series(const FullTrajectory& trajectory) {
  NormalizedSeries s;
  s.times = trajectory.times;
  s.values.reserve(trajectory.n_ir.size());
  for (double n : trajectory.n_ir) s.values.push_back(n / trajectory.n_ir0);
  return s;
}

double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  if (xs.empty() || xs.size() != ys.size()) throw DomainError("interpolate: bad grid");
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  const auto hi = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
  const std::size_t lo = hi - 1;
  const double w = (x - xs[lo]) / (xs[hi] - xs[lo]);
  return ys[lo] + w * (ys[hi] - ys[lo]);
}

Comparison compare_detailed(const NormalizedSeries& a, const NormalizedSeries& b) {
  if (a.times.size() != a.values.size() || b.times.size() != b.values.size() ||
      b.times.empty()) {
    throw DomainError("compare: malformed series");
  }
  // Grids written through CSV lose nothing, but days-to-seconds conversion
  // can move an endpoint by an ulp.
  const double slack = 1e-9 * std::max(1.0, std::abs(b.times.back()));
  const double lo = b.times.front() - slack;
  const double hi = b.times.back() + slack;
  Comparison c;
  double sum = 0.0;
  for (std::size_t i = 0; i < a.times.size(); ++i) {
    const double t = a.times[i];
    if (t < lo || t > hi) continue;
    const double vb = interpolate(b.times, b.values, t);
    const double d = a.values[i] - vb;
    sum += d * d;
    c.max_abs = std::max(c.max_abs, std::abs(d));
    c.times.push_back(t);
    c.a.push_back(a.values[i]);
    c.b.push_back(vb);
  }
  c.points = c.times.size();
  if (c.points == 0) throw DomainError("compare: the two series do not overlap in time");
  c.mse = sum / static_cast<double>(c.points);
  return c;
}

double compare_trajectories(const NormalizedSeries& a, const NormalizedSeries& b) {
  return compare_detailed(a, b).mse;
}

}  // namespace pemwe
