#pragma once

// One-dimensional linear finite elements for H2 diffusion across the
// membrane. Node 0 (x = 0) faces the ACL and carries the Robin transfer
// condition; node N (x = delta_MEM) faces the CCL and carries the Dirichlet
// supersaturation value. Mass and stiffness integrals use the trapezoidal
// rule, which lumps the mass matrix and leaves the P1 stiffness exact.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pemwe/model.hpp"

namespace pemwe {

struct MembraneMesh {
  std::vector<double> nodes;  // m, strictly increasing, nodes.front() == 0
  double spacing = 0.0;       // m

  std::size_t elements() const { return nodes.empty() ? 0 : nodes.size() - 1; }
  double length() const { return nodes.empty() ? 0.0 : nodes.back(); }
};

MembraneMesh make_uniform_mesh(double length, std::size_t elements);

// Assembled, immutable operators. Stiffness is stored as a symmetric
// tridiagonal matrix without any boundary modification; the Robin
// coefficient (k_MEM R T, m/s) is applied to row 0 at step time.
class MembraneSystem {
 public:
  MembraneSystem(MembraneMesh mesh, double diffusivity, double robin_coefficient);

  static MembraneSystem assemble(const ModelParameters& params,
                                 const PhysicalConstants& constants,
                                 std::size_t elements);

  const MembraneMesh& mesh() const { return mesh_; }
  std::size_t nodes() const { return mesh_.nodes.size(); }
  double diffusivity() const { return diffusivity_; }
  double robin_coefficient() const { return robin_; }

  // Distinct for every constructed system; copies share it.
  std::uint64_t id() const { return id_; }

  std::span<const double> mass() const { return mass_; }                // diagonal
  std::span<const double> stiffness_diagonal() const { return stiff_diag_; }
  std::span<const double> stiffness_off_diagonal() const { return stiff_off_; }  // (i, i+1)

 private:
  MembraneMesh mesh_;
  double diffusivity_;
  double robin_;
  std::uint64_t id_;
  std::vector<double> mass_;
  std::vector<double> stiff_diag_;
  std::vector<double> stiff_off_;
};

// Supersaturated H2 concentration at the CCL under quasi-steady conditions.
double ccl_boundary_concentration(double current_density, const ModelParameters& params,
                                  const PhysicalConstants& constants);

// k_MEM R T (c_mem(0) - c_ACL); positive means H2 enters the ACL.
double membrane_flux(double c_mem_at_acl, double c_acl, const ModelParameters& params,
                     const PhysicalConstants& constants);

// Scratch buffers for repeated backward-Euler steps. The tridiagonal
// factorization depends only on dk and the system, so it is kept between
// steps and rebuilt when either changes.
struct MembraneWorkspace {
  std::vector<double> lower, diag, upper, rhs;
  std::vector<double> pivot;  // eliminated diagonal
  std::vector<double> factor; // multipliers of the forward sweep
  double factored_dk = 0.0;
  std::uint64_t factored_for = 0;  // MembraneSystem::id()
};

// One backward-Euler step of (M + dk A') u_new = M u_old + dk b, with the
// Robin row at node 0 and the Dirichlet row at node N replaced by
// u_N = c_ccl. Tridiagonal elimination, in place.
void step_membrane(std::span<double> field, double dk, double c_ccl, double c_acl,
                   const MembraneSystem& system, MembraneWorkspace& workspace);

std::vector<double> step_membrane(std::span<const double> field, double dk, double c_ccl,
                                  double c_acl, const MembraneSystem& system);

// Exact steady state: linear in x with D * slope = kRT (c(0) - c_acl) and
// c(L) = c_ccl. Evaluated at the mesh nodes.
std::vector<double> steady_profile(double c_ccl, double c_acl, const MembraneMesh& mesh,
                                   double diffusivity, double robin_coefficient);
std::vector<double> steady_profile(double c_ccl, double c_acl, const MembraneSystem& system);

}  // namespace pemwe
