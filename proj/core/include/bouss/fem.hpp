#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "bouss/geometry.hpp"
#include "bouss/jet.hpp"
#include "bouss/lagrange.hpp"
#include "bouss/mesh.hpp"
#include "bouss/models.hpp"
#include "bouss/quadrature.hpp"
#include "bouss/sparse.hpp"

namespace bouss {

// Continuous Lagrange space of degree r with 1 (scalar) or 2 (vector)
// components. Vector coefficients are blocked: [u_x nodes..., u_y nodes...].
// The mesh must outlive the space.
class FunctionSpace {
 public:
  FunctionSpace(const Triangulation& mesh, int degree, int components = 1);

  const Triangulation& mesh() const { return *mesh_; }
  int degree() const { return degree_; }
  int components() const { return components_; }
  const LagrangeBasis& basis() const { return *basis_; }

  // Scalar node count; size() counts all components.
  std::size_t num_nodes() const { return coords_.size(); }
  std::size_t size() const { return num_nodes() * static_cast<std::size_t>(components_); }
  int nodes_per_cell() const { return basis_->size(); }

  const std::vector<Vec2>& node_coordinates() const { return coords_; }
  std::span<const int> cell_nodes(std::size_t t) const {
    return {cell_nodes_.data() + t * static_cast<std::size_t>(nodes_per_cell()), static_cast<std::size_t>(nodes_per_cell())};
  }
  // Scalar nodes lying on the boundary, sorted.
  const std::vector<int>& boundary_nodes() const { return boundary_nodes_; }
  // Nodes at mesh vertices come first and share the vertex numbering.
  std::size_t num_vertex_nodes() const { return mesh_->num_vertices(); }

 private:
  const Triangulation* mesh_;
  int degree_;
  int components_;
  const LagrangeBasis* basis_;
  std::vector<Vec2> coords_;
  std::vector<int> cell_nodes_;
  std::vector<int> boundary_nodes_;
};

struct FieldState {
  std::vector<double> eta;
  std::vector<double> u;
  double time = 0.0;
};

struct Discretization {
  int r1 = 1;
  int r2 = 2;
  double nitsche_constant = 50.0;
  // 0 selects 2 max(r1, r2) + 2.
  int quadrature_degree = 0;

  int effective_quadrature_degree() const;
  void validate() const;
};

// Affine map from the reference triangle onto cell t.
struct AffineMap {
  Vec2 origin;
  double j00 = 0, j01 = 0, j10 = 0, j11 = 0;  // columns: v1 - v0, v2 - v0
  double det = 0;
  double i00 = 0, i01 = 0, i10 = 0, i11 = 0;  // inverse

  AffineMap(const Triangulation& mesh, std::size_t t);
  Vec2 map(double xi, double eta) const { return {origin.x + j00 * xi + j01 * eta, origin.y + j10 * xi + j11 * eta}; }
  // Physical gradient from reference derivatives.
  Vec2 gradient(double dxi, double deta) const { return {i00 * dxi + i10 * deta, i01 * dxi + i11 * deta}; }
};

// Basis values and reference derivatives tabulated at quadrature points.
struct ReferenceTable {
  int nq = 0;
  int nb = 0;
  std::vector<double> phi, dxi, deta;  // index q * nb + i
  std::vector<QuadPoint> points;

  ReferenceTable(const LagrangeBasis& basis, const std::vector<QuadPoint>& rule);
};

// Reference coordinates of parameter s in [0,1] along local edge k.
std::array<double, 2> edge_point(int k, double s);

using ScalarFunction = std::function<double(Vec2)>;
using VectorFunction = std::function<Vec2(Vec2)>;
using ScalarJetFunction = std::function<Jet(Vec2)>;
using VectorJetFunction = std::function<std::array<Jet, 2>(Vec2)>;

// (weight u, v); weight defaults to 1. Vector spaces get one block per component.
SparseMatrix assemble_mass(const FunctionSpace& space, const ScalarFunction& weight = {}, int quadrature_degree = 0);
// (weight grad u, grad v) on a scalar space.
SparseMatrix assemble_stiffness(const FunctionSpace& space, const ScalarFunction& weight = {}, int quadrature_degree = 0);
// (grad u . a, grad v . a) for a fixed direction a, scalar space.
SparseMatrix assemble_directional_stiffness(const FunctionSpace& space, Vec2 direction, int quadrature_degree = 0);
// Entries (v_i, u_j) with u in `trial` and v in `test`, both scalar on one mesh.
// Returned as triplets since the block is rectangular when the degrees differ.
std::vector<Triplet> mixed_mass_triplets(const FunctionSpace& test, const FunctionSpace& trial, int quadrature_degree = 0);

// Mass matrix, plus (a + b)(D^2 grad eta, grad psi) for bbm.
SparseMatrix assemble_mass_operator(const FunctionSpace& space, const Bathymetry& bathymetry, const ModelSpec& model,
                                    int quadrature_degree = 0);

// Weak momentum operator with Nitsche slip-wall terms, or the Laplacian form
// with strong u = 0 rows for the simplified model.
SparseMatrix assemble_momentum_operator(const FunctionSpace& uspace, const Bathymetry& bathymetry, const ModelSpec& model,
                                        double nitsche_constant, int quadrature_degree = 0);

std::vector<double> assemble_load(const FunctionSpace& space, const ScalarFunction& f, int quadrature_degree = 0);
std::vector<double> assemble_load(const FunctionSpace& space, const VectorFunction& f, int quadrature_degree = 0);

std::vector<double> l2_project(const FunctionSpace& space, const ScalarFunction& f, int quadrature_degree = 0);
std::vector<double> l2_project(const FunctionSpace& space, const VectorFunction& f, int quadrature_degree = 0);

// Nodal interpolant.
std::vector<double> interpolate(const FunctionSpace& space, const ScalarFunction& f);
std::vector<double> interpolate(const FunctionSpace& space, const VectorFunction& f);

struct ErrorNorms {
  double l2 = 0.0;
  double h1 = 0.0;    // full norm: sqrt(|e|^2 + |grad e|^2)
  double hdiv = 0.0;  // sqrt(|e|^2 + |div e|^2); vector spaces only
};

ErrorNorms error_norms(const FunctionSpace& space, std::span<const double> coeffs, const ScalarJetFunction& exact,
                       int quadrature_degree = 0);
ErrorNorms error_norms(const FunctionSpace& space, std::span<const double> coeffs, const VectorJetFunction& exact,
                       int quadrature_degree = 0);

// Integral of a scalar finite element function.
double integrate(const FunctionSpace& space, std::span<const double> coeffs);
double l2_norm(const FunctionSpace& space, std::span<const double> coeffs);

// Point evaluation of finite element functions. Throws LocationError for
// points outside the mesh.
class FieldEvaluator {
 public:
  explicit FieldEvaluator(const Triangulation& mesh);

  std::vector<double> scalar(const FunctionSpace& space, std::span<const double> coeffs,
                             std::span<const Vec2> points) const;
  std::vector<Vec2> vector(const FunctionSpace& space, std::span<const double> coeffs,
                           std::span<const Vec2> points) const;
  // Cell index and reference coordinates of p.
  std::pair<int, std::array<double, 2>> locate(Vec2 p) const;

 private:
  const Triangulation* mesh_;
  PointLocator locator_;
};

std::vector<double> evaluate_at_points(const FunctionSpace& space, std::span<const double> coeffs,
                                       std::span<const Vec2> points);

}  // namespace bouss
