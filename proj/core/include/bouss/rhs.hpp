#pragma once

#include <optional>
#include <vector>

#include "bouss/fem.hpp"
#include "bouss/models.hpp"

namespace bouss {

// Spaces, operator matrices and right-hand sides of one model on one mesh.
// Geometry and depth are sampled once at quadrature points; the operator
// matrices do not depend on time. The mesh must outlive this object.
class Semidiscretization {
 public:
  Semidiscretization(const Triangulation& mesh, ModelSpec model, Bathymetry bathymetry, Discretization disc = {},
                     std::optional<SpongeSpec> sponge = std::nullopt,
                     std::optional<WavemakerSpec> wavemaker = std::nullopt);

  const Triangulation& mesh() const { return *mesh_; }
  const ModelSpec& model() const { return model_; }
  const Bathymetry& bathymetry() const { return bathymetry_; }
  const Discretization& discretization() const { return disc_; }
  const std::optional<SpongeSpec>& sponge() const { return sponge_; }
  const std::optional<WavemakerSpec>& wavemaker() const { return wavemaker_; }

  const FunctionSpace& eta_space() const { return eta_space_; }
  const FunctionSpace& u_space() const { return u_space_; }

  // Left-hand sides: (eta, psi) [+ (a+b)(D^2 grad eta, grad psi)] and the momentum operator.
  const SparseMatrix& mass_operator() const { return mass_op_; }
  const SparseMatrix& momentum_operator() const { return momentum_op_; }

  // ((D + zeta + eta) u, grad psi) - (zeta_t, psi) [+ a (D^2 grad zeta_t, grad psi)] - (mu eta, psi).
  std::vector<double> rhs_mass(const FieldState& state) const;
  // -(N(u), phi) - g (grad eta, phi) + wavemaker forcing - (mu u, phi).
  std::vector<double> rhs_momentum(const FieldState& state) const;

  // Zeroes the constrained velocity nodes of no-slip models.
  void apply_velocity_constraints(std::vector<double>& u) const;
  const std::vector<int>& constrained_velocity_dofs() const { return constrained_; }

  FieldState zero_state(double t = 0.0) const;
  double total_mass(const std::vector<double>& eta) const { return integrate(eta_space_, eta); }

 private:
  const Triangulation* mesh_;
  ModelSpec model_;
  Bathymetry bathymetry_;
  Discretization disc_;
  std::optional<SpongeSpec> sponge_;
  std::optional<WavemakerSpec> wavemaker_;
  FunctionSpace eta_space_;
  FunctionSpace u_space_;
  ReferenceTable tab_eta_;
  ReferenceTable tab_u_;
  std::vector<AffineMap> maps_;
  // Per cell and quadrature point.
  std::vector<Vec2> qp_x_;
  std::vector<double> qp_w_, qp_depth_, qp_mu_;
  SparseMatrix mass_op_;
  SparseMatrix momentum_op_;
  std::vector<int> constrained_;
};

}  // namespace bouss
