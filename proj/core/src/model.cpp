#include "pemwe/model.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "pemwe/errors.hpp"

namespace pemwe {

namespace {

void require_positive(double value, std::string_view name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw DomainError(fmt::format("{} must be finite and > 0 (got {})", name, value));
  }
}

void require_non_negative(double value, std::string_view name) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw DomainError(fmt::format("{} must be finite and >= 0 (got {})", name, value));
  }
}

}  // namespace

void PhysicalConstants::validate() const {
  require_positive(gas_constant, "gas_constant");
  require_positive(temperature, "temperature");
  require_positive(atmospheric_pressure, "atmospheric_pressure");
  require_positive(site_density, "site_density");
  require_positive(ir_molar_mass, "ir_molar_mass");
  require_positive(ir_density, "ir_density");
}

void ModelParameters::validate() const {
  require_non_negative(k_r, "k_r");
  require_non_negative(k_diss1, "k_diss1");
  require_non_negative(k_diss2, "k_diss2");
  require_non_negative(k_mem, "k_mem");
  require_positive(k_acl, "k_acl");
  require_positive(d_eff, "d_eff");
  require_positive(delta_mem, "delta_mem");
  require_positive(k_l, "k_l");
  require_non_negative(c_henry, "c_henry");
  require_positive(a_geo, "a_geo");
  require_positive(delta_acl, "delta_acl");
  require_positive(eta_np, "eta_np");
  require_positive(i0, "i0");
  require_positive(alpha, "alpha");
  require_positive(e_rev, "e_rev");
}

FastState initial_fast_state(std::size_t membrane_nodes) {
  FastState state;
  state.c_mem.assign(membrane_nodes, 0.0);
  return state;
}

std::string_view to_string(ProfileShape shape) {
  switch (shape) {
    case ProfileShape::hold: return "hold";
    case ProfileShape::square: return "square";
    case ProfileShape::triangle: return "triangle";
    case ProfileShape::sawtooth_up: return "sawtooth_up";
    case ProfileShape::sawtooth_down: return "sawtooth_down";
  }
  return "unknown";
}

ProfileShape parse_profile_shape(std::string_view name) {
  for (auto shape : {ProfileShape::hold, ProfileShape::square, ProfileShape::triangle,
                     ProfileShape::sawtooth_up, ProfileShape::sawtooth_down}) {
    if (name == to_string(shape)) return shape;
  }
  throw DomainError(fmt::format(
      "unknown profile '{}' (expected hold|square|triangle|sawtooth_up|sawtooth_down)",
      name));
}

void OperationProfile::validate() const {
  require_positive(period, "period");
  require_non_negative(e_min, "e_min");
  if (!(e_max >= e_min)) {
    throw DomainError(fmt::format("e_max ({}) must be >= e_min ({})", e_max, e_min));
  }
}

namespace {

long checked_ratio(double numerator, double denominator, std::string_view what) {
  const double ratio = numerator / denominator;
  const double rounded = std::round(ratio);
  if (!(rounded >= 1.0) || std::abs(ratio - rounded) > 1e-9 * rounded) {
    throw DomainError(fmt::format("{} must be a positive integer (got {})", what, ratio));
  }
  return static_cast<long>(rounded);
}

}  // namespace

void MultiscaleConfig::validate_fast() const {
  require_positive(dk, "dk");
  require_positive(period, "period");
  require_non_negative(tolp, "tolp");
  require_positive(newton_tol, "newton_tol");
  if (max_periods < 1) throw DomainError("max_periods must be >= 1");
  if (newton_max_iter < 1) throw DomainError("newton_max_iter must be >= 1");
  if (n_elements < 1) throw DomainError("n_elements must be >= 1");
  if (!(dk < period)) {
    throw DomainError(fmt::format("need dk < period (got {}, {})", dk, period));
  }
  steps_per_period();
}

void MultiscaleConfig::validate() const {
  validate_fast();
  require_positive(dK, "dK");
  require_positive(horizon, "horizon");
  if (!(period <= dK) || !(dK <= horizon)) {
    throw DomainError(fmt::format("need period <= dK <= horizon (got {}, {}, {})", period, dK,
                                  horizon));
  }
  periods_per_macro_step();
  macro_steps();
}

long MultiscaleConfig::steps_per_period() const {
  return checked_ratio(period, dk, "period / dk");
}

long MultiscaleConfig::periods_per_macro_step() const {
  return checked_ratio(dK, period, "dK / period");
}

long MultiscaleConfig::macro_steps() const {
  return checked_ratio(horizon, dK, "horizon / dK");
}

double potential_at_phase(const OperationProfile& p, double phase) {
  const double span = p.e_max - p.e_min;
  switch (p.shape) {
    case ProfileShape::hold:
      return p.e_max;
    case ProfileShape::square:
      return phase < 0.5 ? p.e_max : p.e_min;
    case ProfileShape::triangle:
      return phase < 0.5 ? p.e_min + span * (2.0 * phase)
                         : p.e_max - span * (2.0 * phase - 1.0);
    case ProfileShape::sawtooth_up:
      return p.e_min + span * phase;
    case ProfileShape::sawtooth_down:
      return p.e_max - span * phase;
  }
  return p.e_max;
}

double potential_left_limit_at_phase(const OperationProfile& p, double phase) {
  // The waveforms only jump at phase 0 (== 1) and, for the square wave, at 1/2.
  switch (p.shape) {
    case ProfileShape::square:
      if (phase == 0.0) return p.e_min;
      if (phase == 0.5) return p.e_max;
      break;
    case ProfileShape::sawtooth_up:
      if (phase == 0.0) return p.e_max;
      break;
    case ProfileShape::sawtooth_down:
      if (phase == 0.0) return p.e_min;
      break;
    default:
      break;
  }
  return potential_at_phase(p, phase);
}

double potential_at(const OperationProfile& profile, double s) {
  const double local = std::fmod(s, profile.period);
  return potential_at_phase(profile, local / profile.period);
}

double current_density(double potential, const ModelParameters& params,
                       const PhysicalConstants& constants) {
  if (!(potential > params.e_rev)) return 0.0;
  return params.i0 * std::exp(params.alpha * constants.f() * (potential - params.e_rev));
}

PartialPressures partial_pressures(double c_o2, double c_h2,
                                   const PhysicalConstants& constants) {
  const double rt = constants.rt();
  return {c_o2 * rt, c_h2 * rt};
}

GasFractions gas_fractions(double p_o2, double p_h2) {
  const double total = p_o2 + p_h2;
  if (!(total > 0.0)) return {0.0, 0.0};
  const double x_o2 = p_o2 / total;
  // X_H2 as the complement keeps the pair summing to one exactly.
  return {x_o2, 1.0 - x_o2};
}

double total_outflow(double p_o2, double p_h2, const PhysicalConstants& constants,
                     const ModelParameters& params) {
  const double drive = (p_o2 + p_h2) - constants.atmospheric_pressure;
  return drive > 0.0 ? params.k_acl * drive : 0.0;
}

Ecsa ecsa_and_radius(double n_ir, const ModelParameters& params,
                     const PhysicalConstants& constants) {
  if (!(n_ir > 0.0)) {
    throw DomainError(fmt::format("ecsa_and_radius: n_ir must be > 0 (got {})", n_ir));
  }
  constexpr double pi = std::numbers::pi;
  const double radius = std::cbrt(3.0 * n_ir * constants.ir_molar_mass /
                                  (4.0 * pi * constants.ir_density * params.eta_np));
  return {params.eta_np * 4.0 * pi * radius * radius, radius};
}

double derive_particle_count(double area0, double n_ir0,
                             const PhysicalConstants& constants) {
  if (!(area0 > 0.0) || !(n_ir0 > 0.0)) {
    throw DomainError(fmt::format(
        "derive_particle_count: area and amount must be > 0 (got {}, {})", area0, n_ir0));
  }
  // A = eta 4 pi r^2 with eta (4/3) pi r^3 = V  =>  eta = A^3 / (4 pi (3V)^2).
  const double volume3 = 3.0 * n_ir0 * constants.ir_molar_mass / constants.ir_density;
  return area0 * area0 * area0 / (4.0 * std::numbers::pi * volume3 * volume3);
}

AclCoefficients acl_coefficients(double potential, double membrane_inflow,
                                 const ModelParameters& params,
                                 const PhysicalConstants& constants) {
  AclCoefficients k;
  k.rt = constants.rt();
  k.reduction = 2.0 * params.k_r * k.rt;
  k.oxidation = params.k_diss1 * std::exp(constants.f() * potential) / constants.site_density;
  k.volume_ratio = params.a_geo / params.v_acl();
  k.o2_source = current_density(potential, params, constants) /
                (PhysicalConstants::electrons_per_o2 * PhysicalConstants::faraday);
  k.membrane_inflow = membrane_inflow;
  k.k_acl = params.k_acl;
  k.p_atm = constants.atmospheric_pressure;
  return k;
}

AclVector acl_rhs(const AclVector& y, const AclCoefficients& k) {
  const double theta = y[0];
  const double p_o2 = y[1] * k.rt;
  const double p_h2 = y[2] * k.rt;
  const double total = p_o2 + p_h2;

  double out_o2 = 0.0;
  double out_h2 = 0.0;
  if (total > k.p_atm) {
    // F_tot X_i = k_acl (P - P_atm) P_i / P
    const double scale = k.k_acl * (1.0 - k.p_atm / total);
    out_o2 = scale * p_o2;
    out_h2 = scale * p_h2;
  }
  const double reduced = 1.0 - theta;
  return {
      k.reduction * reduced * reduced * y[2] - k.oxidation * theta,
      k.volume_ratio * (k.o2_source - out_o2),
      k.volume_ratio * (k.membrane_inflow - out_h2),
  };
}

AclMatrix acl_jacobian(const AclVector& y, const AclCoefficients& k) {
  AclMatrix jac{};
  const double theta = y[0];
  const double reduced = 1.0 - theta;
  jac[0][0] = -2.0 * k.reduction * reduced * y[2] - k.oxidation;
  jac[0][2] = k.reduction * reduced * reduced;

  const double p_o2 = y[1] * k.rt;
  const double p_h2 = y[2] * k.rt;
  const double total = p_o2 + p_h2;
  if (total > k.p_atm) {
    const double base = k.k_acl * (1.0 - k.p_atm / total);
    const double cross = k.k_acl * k.p_atm / (total * total);
    // d(out_i)/d(P_j) = base delta_ij + k P_atm P_i / P^2
    const double d_o2_do2 = base + cross * p_o2;
    const double d_o2_dh2 = cross * p_o2;
    const double d_h2_do2 = cross * p_h2;
    const double d_h2_dh2 = base + cross * p_h2;
    const double g = -k.volume_ratio * k.rt;
    jac[1][1] = g * d_o2_do2;
    jac[1][2] = g * d_o2_dh2;
    jac[2][1] = g * d_h2_do2;
    jac[2][2] = g * d_h2_dh2;
  }
  return jac;
}

FastRates fast_rhs(const FastState& state, double potential, double membrane_inflow,
                   const ModelParameters& params, const PhysicalConstants& constants) {
  const auto k = acl_coefficients(potential, membrane_inflow, params, constants);
  const auto d = acl_rhs({state.theta1, state.c_o2, state.c_h2}, k);
  return {d[0], d[1], d[2]};
}

double dissolution_rate(double theta1, double potential, double n_ir,
                        const ModelParameters& params,
                        const PhysicalConstants& constants) {
  const double area = ecsa_and_radius(n_ir, params, constants).area;
  const double mix = theta1 * params.k_diss1 + (1.0 - theta1) * params.k_diss2;
  return -(area / params.a_geo) * mix * std::exp(constants.f() * potential);
}

}  // namespace pemwe
