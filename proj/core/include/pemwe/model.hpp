#pragma once

// Anode-catalyst-layer (ACL) degradation model: domain types, operation
// profiles, the current-density closure, gas-phase relations and the
// right-hand sides of the fast ACL equations and the slow dissolution law.
//
// Unit convention for the dissolution constants: k_diss1 and k_diss2 are
// empirical lumped coefficients. In the site-balance equation k_diss1
// multiplies exp(f E) / gamma and yields a rate in 1/s; in the dissolution
// law the same numbers multiply (A_act / A_geo) exp(f E) and yield mol/s.
// Only the numbers are fitted, not the units.

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace pemwe {

struct PhysicalConstants {
  static constexpr double faraday = 96485.0;       // C/mol
  static constexpr double electrons_per_o2 = 4.0;  // z_O2

  double gas_constant = 0.0;          // J/(mol K)
  double temperature = 0.0;           // K
  double atmospheric_pressure = 0.0;  // Pa
  double site_density = 0.0;          // gamma, mol/m^2
  double ir_molar_mass = 0.0;         // g/mol
  double ir_density = 0.0;            // g/m^3

  // f = F / (R T), 1/V.
  double f() const { return faraday / (gas_constant * temperature); }
  double rt() const { return gas_constant * temperature; }

  // Throws DomainError unless every field is strictly positive.
  void validate() const;
};

struct ModelParameters {
  double k_r = 0.0;        // reduction rate constant, 1/(Pa s)
  double k_diss1 = 0.0;    // state-1 dissolution constant (lumped units)
  double k_diss2 = 0.0;    // state-2 dissolution constant (lumped units)
  double k_acl = 0.0;      // ACL outflow coefficient, mol/(m^2 s Pa)
  double k_mem = 0.0;      // membrane/ACL transfer coefficient, 1/m
  double d_eff = 0.0;      // H2 diffusivity in the membrane, m^2/s
  double delta_mem = 0.0;  // membrane thickness, m
  double k_l = 0.0;        // CCL mass-transfer coefficient, m/s
  double c_henry = 0.0;    // H2 saturation concentration, mol/m^3
  double a_geo = 0.0;      // geometric cell area, m^2
  double delta_acl = 0.0;  // ACL thickness, m
  double eta_np = 0.0;     // number of active nanoparticles
  double i0 = 0.0;         // exchange current density, A/m^2
  double alpha = 0.0;      // Tafel slope factor
  double e_rev = 0.0;      // reversible potential, V

  double v_acl() const { return a_geo * delta_acl; }

  // Geometry, transport and polarization entries must be strictly positive.
  // Rate constants (k_r, k_diss1, k_diss2, k_mem) may be zero so that
  // decoupled limits can be simulated; negative values are rejected.
  void validate() const;
};

// theta1 is the reduced-site fraction (theta2 = 1 - theta1). Concentrations
// in mol/m^3; c_mem holds one value per membrane mesh node, node 0 at the ACL.
struct FastState {
  double theta1 = 0.0;
  double c_o2 = 0.0;
  double c_h2 = 0.0;
  std::vector<double> c_mem;
};

// Fresh, purged cell: fully oxidized surface, no gas, empty membrane.
FastState initial_fast_state(std::size_t membrane_nodes);

struct SlowState {
  double n_ir = 0.0;  // mol of Ir in nanoparticle form
};

enum class ProfileShape { hold, square, triangle, sawtooth_up, sawtooth_down };

std::string_view to_string(ProfileShape shape);
// Throws DomainError for unknown names.
ProfileShape parse_profile_shape(std::string_view name);

struct OperationProfile {
  ProfileShape shape = ProfileShape::hold;
  double e_min = 0.0;   // V
  double e_max = 0.0;   // V
  double period = 0.0;  // s

  void validate() const;
};

enum class NonConvergencePolicy { accept, abort };

struct MultiscaleConfig {
  double dk = 0.0;       // fast step, s
  double dK = 0.0;       // macro (slow) step, s
  double period = 0.0;   // forcing period, s
  double tolp = 0.0;     // periodicity tolerance on the ACL variables
  int max_periods = 0;   // cap on periods per limit-cycle search
  double horizon = 0.0;  // simulated time, s
  std::size_t n_elements = 0;
  double newton_tol = 0.0;
  int newton_max_iter = 0;
  NonConvergencePolicy on_nonconvergence = NonConvergencePolicy::accept;

  // dk < period <= dK <= horizon, period = m dk and dK = n period for
  // integers m, n (relative tolerance 1e-9).
  void validate() const;
  // Only what a fast-scale run needs: dk < period = m dk and the solver
  // controls. dK and horizon are not examined.
  void validate_fast() const;
  long steps_per_period() const;
  long periods_per_macro_step() const;
  long macro_steps() const;
};

// E(s mod P); right-continuous at the switching instants.
double potential_at(const OperationProfile& profile, double s);
// Same waveform evaluated from the phase fraction in [0, 1).
double potential_at_phase(const OperationProfile& profile, double phase);
// Left limit E(phase^-); differs from potential_at_phase only at jumps.
double potential_left_limit_at_phase(const OperationProfile& profile,
                                     double phase);

// Tafel closure: i0 exp(alpha f (E - E_rev)) above E_rev, zero otherwise.
double current_density(double potential, const ModelParameters& params,
                       const PhysicalConstants& constants);

struct PartialPressures {
  double o2 = 0.0;  // Pa
  double h2 = 0.0;  // Pa
};
PartialPressures partial_pressures(double c_o2, double c_h2,
                                   const PhysicalConstants& constants);

struct GasFractions {
  double o2 = 0.0;
  double h2 = 0.0;
};
// Zero total pressure returns (0, 0): no gas, no flow.
GasFractions gas_fractions(double p_o2, double p_h2);

// max(0, k_acl ((P_O2 + P_H2) - P_atm)), mol/(m^2 s).
double total_outflow(double p_o2, double p_h2,
                     const PhysicalConstants& constants,
                     const ModelParameters& params);

struct Ecsa {
  double area = 0.0;    // m^2
  double radius = 0.0;  // m
};
Ecsa ecsa_and_radius(double n_ir, const ModelParameters& params,
                     const PhysicalConstants& constants);

// Particle count that makes ecsa_and_radius(n_ir0) reproduce area0.
double derive_particle_count(double area0, double n_ir0,
                             const PhysicalConstants& constants);

// Per-step coefficients of the three ACL equations at a fixed potential and
// fixed membrane inflow. Built once per fast step and reused by Newton.
struct AclCoefficients {
  double reduction = 0.0;    // 2 k_r R T, 1/(s mol/m^3)
  double oxidation = 0.0;    // k_diss1 exp(f E) / gamma, 1/s
  double volume_ratio = 0.0; // A_geo / V_ACL, 1/m
  double o2_source = 0.0;    // i / (z F), mol/(m^2 s)
  double membrane_inflow = 0.0;  // F_mem, mol/(m^2 s)
  double k_acl = 0.0;
  double rt = 0.0;
  double p_atm = 0.0;
};

AclCoefficients acl_coefficients(double potential, double membrane_inflow,
                                 const ModelParameters& params,
                                 const PhysicalConstants& constants);

using AclVector = std::array<double, 3>;                 // theta1, c_O2, c_H2
using AclMatrix = std::array<std::array<double, 3>, 3>;  // row = equation

AclVector acl_rhs(const AclVector& y, const AclCoefficients& k);
// Analytic Jacobian of acl_rhs. The outflow clamp is piecewise smooth; the
// active branch is differentiated.
AclMatrix acl_jacobian(const AclVector& y, const AclCoefficients& k);

struct FastRates {
  double d_theta1 = 0.0;  // 1/s
  double d_c_o2 = 0.0;    // mol/(m^3 s)
  double d_c_h2 = 0.0;    // mol/(m^3 s)
};
FastRates fast_rhs(const FastState& state, double potential,
                   double membrane_inflow, const ModelParameters& params,
                   const PhysicalConstants& constants);

// dN/dt in mol/s, always <= 0.
double dissolution_rate(double theta1, double potential, double n_ir,
                        const ModelParameters& params,
                        const PhysicalConstants& constants);

}  // namespace pemwe
