#include "pemwe/membrane.hpp"

#include <atomic>
#include <cmath>

#include <fmt/format.h>

#include "pemwe/errors.hpp"

namespace pemwe {

MembraneMesh make_uniform_mesh(double length, std::size_t elements) {
  if (!(length > 0.0) || elements < 1) {
    throw DomainError(fmt::format("membrane mesh needs length > 0 and >= 1 element "
                                  "(got {}, {})", length, elements));
  }
  MembraneMesh mesh;
  mesh.spacing = length / static_cast<double>(elements);
  mesh.nodes.resize(elements + 1);
  for (std::size_t i = 0; i <= elements; ++i) {
    mesh.nodes[i] = length * (static_cast<double>(i) / static_cast<double>(elements));
  }
  return mesh;
}

MembraneSystem::MembraneSystem(MembraneMesh mesh, double diffusivity, double robin_coefficient)
    : mesh_(std::move(mesh)), diffusivity_(diffusivity), robin_(robin_coefficient) {
  static std::atomic<std::uint64_t> next_id{1};
  id_ = next_id++;
  const std::size_t n = mesh_.nodes.size();
  if (n < 2) throw DomainError("membrane system needs at least one element");
  if (!(diffusivity_ > 0.0) || !(robin_ >= 0.0)) {
    throw DomainError("membrane system needs D > 0 and Robin coefficient >= 0");
  }
  mass_.assign(n, 0.0);
  stiff_diag_.assign(n, 0.0);
  stiff_off_.assign(n - 1, 0.0);
  for (std::size_t e = 0; e + 1 < n; ++e) {
    const double h = mesh_.nodes[e + 1] - mesh_.nodes[e];
    if (!(h > 0.0)) throw DomainError("membrane mesh nodes must be strictly increasing");
    // Trapezoidal rule on each element: lumped mass h/2 per end node.
    mass_[e] += 0.5 * h;
    mass_[e + 1] += 0.5 * h;
    const double k = diffusivity_ / h;
    stiff_diag_[e] += k;
    stiff_diag_[e + 1] += k;
    stiff_off_[e] -= k;
  }
}

MembraneSystem MembraneSystem::assemble(const ModelParameters& params,
                                        const PhysicalConstants& constants,
                                        std::size_t elements) {
  return MembraneSystem(make_uniform_mesh(params.delta_mem, elements), params.d_eff,
                        params.k_mem * constants.rt());
}

double ccl_boundary_concentration(double current_density, const ModelParameters& params,
                                  const PhysicalConstants&) {
  const double source = current_density / (2.0 * PhysicalConstants::faraday);
  return (source + params.k_l * params.c_henry) /
         (params.k_l + params.d_eff / params.delta_mem);
}

double membrane_flux(double c_mem_at_acl, double c_acl, const ModelParameters& params,
                     const PhysicalConstants& constants) {
  return params.k_mem * constants.rt() * (c_mem_at_acl - c_acl);
}

void step_membrane(std::span<double> field, double dk, double c_ccl, double c_acl,
                   const MembraneSystem& system, MembraneWorkspace& ws) {
  const std::size_t n = system.nodes();
  if (field.size() != n) {
    throw DomainError(fmt::format("membrane field has {} nodes, system has {}",
                                  field.size(), n));
  }
  if (!(dk > 0.0)) throw DomainError("membrane step needs dk > 0");
  const auto mass = system.mass();
  const double robin = system.robin_coefficient();

  if (ws.factored_for != system.id() || ws.factored_dk != dk || ws.pivot.size() != n) {
    const auto kd = system.stiffness_diagonal();
    const auto ko = system.stiffness_off_diagonal();
    ws.lower.assign(n, 0.0);
    ws.diag.assign(n, 0.0);
    ws.upper.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      ws.diag[i] = mass[i] + dk * kd[i];
      ws.lower[i] = i > 0 ? dk * ko[i - 1] : 0.0;
      ws.upper[i] = i + 1 < n ? dk * ko[i] : 0.0;
    }
    ws.diag[0] += dk * robin;
    // Dirichlet row replacement at the CCL.
    ws.lower[n - 1] = 0.0;
    ws.diag[n - 1] = 1.0;

    // Thomas factorization; the matrix is an M-matrix, no pivoting required.
    ws.pivot.assign(n, 0.0);
    ws.factor.assign(n, 0.0);
    ws.pivot[0] = ws.diag[0];
    for (std::size_t i = 1; i < n; ++i) {
      ws.factor[i] = ws.lower[i] / ws.pivot[i - 1];
      ws.pivot[i] = ws.diag[i] - ws.factor[i] * ws.upper[i - 1];
    }
    ws.factored_for = system.id();
    ws.factored_dk = dk;
  }

  ws.rhs.resize(n);
  for (std::size_t i = 0; i < n; ++i) ws.rhs[i] = mass[i] * field[i];
  ws.rhs[0] += dk * robin * c_acl;
  ws.rhs[n - 1] = c_ccl;
  for (std::size_t i = 1; i < n; ++i) ws.rhs[i] -= ws.factor[i] * ws.rhs[i - 1];
  field[n - 1] = ws.rhs[n - 1] / ws.pivot[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    field[i] = (ws.rhs[i] - ws.upper[i] * field[i + 1]) / ws.pivot[i];
  }
}

std::vector<double> step_membrane(std::span<const double> field, double dk, double c_ccl,
                                  double c_acl, const MembraneSystem& system) {
  std::vector<double> out(field.begin(), field.end());
  MembraneWorkspace ws;
  step_membrane(out, dk, c_ccl, c_acl, system, ws);
  return out;
}

std::vector<double> steady_profile(double c_ccl, double c_acl, const MembraneMesh& mesh,
                                   double diffusivity, double robin_coefficient) {
  const double length = mesh.length();
  const double slope =
      robin_coefficient * (c_ccl - c_acl) / (diffusivity + robin_coefficient * length);
  std::vector<double> out(mesh.nodes.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = c_ccl - slope * (length - mesh.nodes[i]);
  }
  return out;
}

std::vector<double> steady_profile(double c_ccl, double c_acl, const MembraneSystem& system) {
  return steady_profile(c_ccl, c_acl, system.mesh(), system.diffusivity(),
                        system.robin_coefficient());
}

}  // namespace pemwe
