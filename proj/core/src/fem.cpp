#include "bouss/fem.hpp"

#include <algorithm>
#include <cmath>

#include "bouss/error.hpp"

namespace bouss {

FunctionSpace::FunctionSpace(const Triangulation& mesh, int degree, int components)
    : mesh_(&mesh), degree_(degree), components_(components), basis_(&lagrange_basis(degree)) {
  if (components != 1 && components != 2) throw InvalidArgument("function space needs 1 or 2 components");
  const std::size_t nv = mesh.num_vertices();
  const std::size_t ne = mesh.num_edges();
  const std::size_t nt = mesh.num_triangles();
  const int per_edge = degree - 1;
  const int per_cell = degree == 3 ? 1 : 0;
  const std::size_t total = nv + ne * per_edge + nt * per_cell;
  coords_.assign(total, Vec2{});
  const int nb = basis_->size();
  cell_nodes_.resize(nt * static_cast<std::size_t>(nb));

  for (std::size_t v = 0; v < nv; ++v) coords_[v] = mesh.vertices()[v];
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles()[t];
    int* nodes = cell_nodes_.data() + t * nb;
    for (int k = 0; k < 3; ++k) nodes[k] = tri[k];
    const AffineMap map(mesh, t);
    int local = 3;
    for (int k = 0; k < 3; ++k) {
      const int e = mesh.triangle_edges(t)[k];
      const bool forward = mesh.edges()[e].v[0] == tri[k];
      for (int j = 0; j < per_edge; ++j, ++local) {
        const int offset = forward ? j : per_edge - 1 - j;
        const int g = static_cast<int>(nv + static_cast<std::size_t>(e) * per_edge + offset);
        nodes[local] = g;
        const auto& ref = basis_->nodes()[local];
        coords_[g] = map.map(ref[0], ref[1]);
      }
    }
    for (int j = 0; j < per_cell; ++j, ++local) {
      const int g = static_cast<int>(nv + ne * per_edge + t * per_cell + j);
      nodes[local] = g;
      const auto& ref = basis_->nodes()[local];
      coords_[g] = map.map(ref[0], ref[1]);
    }
  }

  std::vector<char> on_boundary(total, 0);
  for (const auto& f : mesh.boundary_facets()) {
    on_boundary[f.v[0]] = on_boundary[f.v[1]] = 1;
    for (int j = 0; j < per_edge; ++j) on_boundary[nv + static_cast<std::size_t>(f.edge) * per_edge + j] = 1;
  }
  for (std::size_t i = 0; i < total; ++i)
    if (on_boundary[i]) boundary_nodes_.push_back(static_cast<int>(i));
}

int Discretization::effective_quadrature_degree() const {
  return quadrature_degree > 0 ? quadrature_degree : 2 * std::max(r1, r2) + 2;
}

void Discretization::validate() const {
  if (r1 < 1 || r1 > 3 || r2 < 1 || r2 > 3) throw InvalidArgument("element degrees must be 1, 2 or 3");
  if (!(nitsche_constant > 0.0)) throw InvalidArgument("Nitsche constant must be positive");
  if (quadrature_degree != 0 && quadrature_degree < 2 * std::max(r1, r2) + 2) {
    throw InvalidArgument("quadrature degree must be at least 2 max(r1, r2) + 2");
  }
}

AffineMap::AffineMap(const Triangulation& mesh, std::size_t t) {
  const auto& tri = mesh.triangles()[t];
  const Vec2 a = mesh.vertices()[tri[0]];
  const Vec2 b = mesh.vertices()[tri[1]];
  const Vec2 c = mesh.vertices()[tri[2]];
  origin = a;
  j00 = b.x - a.x;
  j01 = c.x - a.x;
  j10 = b.y - a.y;
  j11 = c.y - a.y;
  det = j00 * j11 - j01 * j10;
  i00 = j11 / det;
  i01 = -j01 / det;
  i10 = -j10 / det;
  i11 = j00 / det;
}

ReferenceTable::ReferenceTable(const LagrangeBasis& basis, const std::vector<QuadPoint>& rule)
    : nq(static_cast<int>(rule.size())), nb(basis.size()), points(rule) {
  phi.resize(static_cast<std::size_t>(nq) * nb);
  dxi.resize(phi.size());
  deta.resize(phi.size());
  for (int q = 0; q < nq; ++q) {
    const std::size_t o = static_cast<std::size_t>(q) * nb;
    basis.values(rule[q].xi, rule[q].eta, std::span(phi.data() + o, nb));
    basis.gradients(rule[q].xi, rule[q].eta, std::span(dxi.data() + o, nb), std::span(deta.data() + o, nb));
  }
}

std::array<double, 2> edge_point(int k, double s) {
  switch (k) {
    case 0:
      return {s, 0.0};
    case 1:
      return {1.0 - s, s};
    default:
      return {0.0, 1.0 - s};
  }
}

namespace {

int qdeg_or_default(const FunctionSpace& space, int q) { return q > 0 ? q : 2 * space.degree() + 2; }

SolverOptions projection_options() {
  SolverOptions o;
  o.tol = 1e-13;
  return o;
}

std::vector<double> solve_mass(const SparseMatrix& M, std::span<const double> b) {
  auto res = cg_solve(M, b, projection_options());
  if (!res.report.converged && res.report.final_residual > 1e-10) {
    throw ConvergenceError("L2 projection: mass-matrix solve did not converge (residual " +
                           std::to_string(res.report.final_residual) + ")");
  }
  return std::move(res.x);
}

}  // namespace

std::vector<double> assemble_load(const FunctionSpace& space, const ScalarFunction& f, int quadrature_degree) {
  if (space.components() != 1) throw InvalidArgument("scalar load needs a scalar space");
  const ReferenceTable tab(space.basis(), triangle_rule(qdeg_or_default(space, quadrature_degree)));
  std::vector<double> b(space.size(), 0.0);
  const auto& mesh = space.mesh();
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const AffineMap map(mesh, t);
    const auto nodes = space.cell_nodes(t);
    for (int q = 0; q < tab.nq; ++q) {
      const auto& qp = tab.points[q];
      const double w = qp.weight * std::abs(map.det) * f(map.map(qp.xi, qp.eta));
      for (int i = 0; i < tab.nb; ++i) b[nodes[i]] += w * tab.phi[q * tab.nb + i];
    }
  }
  return b;
}

std::vector<double> assemble_load(const FunctionSpace& space, const VectorFunction& f, int quadrature_degree) {
  if (space.components() != 2) throw InvalidArgument("vector load needs a vector space");
  const ReferenceTable tab(space.basis(), triangle_rule(qdeg_or_default(space, quadrature_degree)));
  const std::size_t n = space.num_nodes();
  std::vector<double> b(space.size(), 0.0);
  const auto& mesh = space.mesh();
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const AffineMap map(mesh, t);
    const auto nodes = space.cell_nodes(t);
    for (int q = 0; q < tab.nq; ++q) {
      const auto& qp = tab.points[q];
      const double w = qp.weight * std::abs(map.det);
      const Vec2 v = f(map.map(qp.xi, qp.eta));
      for (int i = 0; i < tab.nb; ++i) {
        const double p = w * tab.phi[q * tab.nb + i];
        b[nodes[i]] += p * v.x;
        b[n + nodes[i]] += p * v.y;
      }
    }
  }
  return b;
}

std::vector<double> l2_project(const FunctionSpace& space, const ScalarFunction& f, int quadrature_degree) {
  const auto b = assemble_load(space, f, quadrature_degree);
  return solve_mass(assemble_mass(space, {}, quadrature_degree), b);
}

std::vector<double> l2_project(const FunctionSpace& space, const VectorFunction& f, int quadrature_degree) {
  const auto b = assemble_load(space, f, quadrature_degree);
  return solve_mass(assemble_mass(space, {}, quadrature_degree), b);
}

std::vector<double> interpolate(const FunctionSpace& space, const ScalarFunction& f) {
  std::vector<double> c(space.num_nodes());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = f(space.node_coordinates()[i]);
  return c;
}

std::vector<double> interpolate(const FunctionSpace& space, const VectorFunction& f) {
  const std::size_t n = space.num_nodes();
  std::vector<double> c(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 v = f(space.node_coordinates()[i]);
    c[i] = v.x;
    c[n + i] = v.y;
  }
  return c;
}

ErrorNorms error_norms(const FunctionSpace& space, std::span<const double> coeffs, const ScalarJetFunction& exact,
                       int quadrature_degree) {
  if (space.components() != 1 || coeffs.size() != space.size()) throw InvalidArgument("coefficients do not match space");
  const ReferenceTable tab(space.basis(), triangle_rule(qdeg_or_default(space, quadrature_degree)));
  double l2 = 0.0, grad = 0.0;
  const auto& mesh = space.mesh();
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const AffineMap map(mesh, t);
    const auto nodes = space.cell_nodes(t);
    for (int q = 0; q < tab.nq; ++q) {
      const auto& qp = tab.points[q];
      double v = 0.0, dx = 0.0, dy = 0.0;
      for (int i = 0; i < tab.nb; ++i) {
        const double c = coeffs[nodes[i]];
        v += c * tab.phi[q * tab.nb + i];
        const Vec2 g = map.gradient(tab.dxi[q * tab.nb + i], tab.deta[q * tab.nb + i]);
        dx += c * g.x;
        dy += c * g.y;
      }
      const Jet e = exact(map.map(qp.xi, qp.eta));
      const double w = qp.weight * std::abs(map.det);
      l2 += w * (e.v - v) * (e.v - v);
      grad += w * ((e.dx - dx) * (e.dx - dx) + (e.dy - dy) * (e.dy - dy));
    }
  }
  return {std::sqrt(l2), std::sqrt(l2 + grad), 0.0};
}

ErrorNorms error_norms(const FunctionSpace& space, std::span<const double> coeffs, const VectorJetFunction& exact,
                       int quadrature_degree) {
  if (space.components() != 2 || coeffs.size() != space.size()) throw InvalidArgument("coefficients do not match space");
  const ReferenceTable tab(space.basis(), triangle_rule(qdeg_or_default(space, quadrature_degree)));
  const std::size_t n = space.num_nodes();
  double l2 = 0.0, grad = 0.0, div = 0.0;
  const auto& mesh = space.mesh();
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const AffineMap map(mesh, t);
    const auto nodes = space.cell_nodes(t);
    for (int q = 0; q < tab.nq; ++q) {
      const auto& qp = tab.points[q];
      double u = 0, v = 0, ux = 0, uy = 0, vx = 0, vy = 0;
      for (int i = 0; i < tab.nb; ++i) {
        const double cu = coeffs[nodes[i]];
        const double cv = coeffs[n + nodes[i]];
        const double p = tab.phi[q * tab.nb + i];
        const Vec2 g = map.gradient(tab.dxi[q * tab.nb + i], tab.deta[q * tab.nb + i]);
        u += cu * p;
        v += cv * p;
        ux += cu * g.x;
        uy += cu * g.y;
        vx += cv * g.x;
        vy += cv * g.y;
      }
      const auto e = exact(map.map(qp.xi, qp.eta));
      const double w = qp.weight * std::abs(map.det);
      l2 += w * ((e[0].v - u) * (e[0].v - u) + (e[1].v - v) * (e[1].v - v));
      grad += w * ((e[0].dx - ux) * (e[0].dx - ux) + (e[0].dy - uy) * (e[0].dy - uy) + (e[1].dx - vx) * (e[1].dx - vx) +
                   (e[1].dy - vy) * (e[1].dy - vy));
      const double de = (e[0].dx + e[1].dy) - (ux + vy);
      div += w * de * de;
    }
  }
  return {std::sqrt(l2), std::sqrt(l2 + grad), std::sqrt(l2 + div)};
}

double integrate(const FunctionSpace& space, std::span<const double> coeffs) {
  if (space.components() != 1 || coeffs.size() != space.size()) throw InvalidArgument("coefficients do not match space");
  const ReferenceTable tab(space.basis(), triangle_rule(space.degree()));
  const auto& mesh = space.mesh();
  double s = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const double area = 0.5 * std::abs(AffineMap(mesh, t).det);
    const auto nodes = space.cell_nodes(t);
    double cell = 0.0;
    for (int q = 0; q < tab.nq; ++q) {
      double v = 0.0;
      for (int i = 0; i < tab.nb; ++i) v += coeffs[nodes[i]] * tab.phi[q * tab.nb + i];
      cell += tab.points[q].weight * v;
    }
    s += 2.0 * area * cell;
  }
  return s;
}

double l2_norm(const FunctionSpace& space, std::span<const double> coeffs) {
  if (coeffs.size() != space.size()) throw InvalidArgument("coefficients do not match space");
  const auto M = assemble_mass(space);
  const auto Mc = M * coeffs;
  return std::sqrt(std::max(0.0, dot(coeffs, Mc)));
}

FieldEvaluator::FieldEvaluator(const Triangulation& mesh) : mesh_(&mesh), locator_(mesh) {}

std::pair<int, std::array<double, 2>> FieldEvaluator::locate(Vec2 p) const {
  const auto hit = locator_.locate(p);
  if (!hit) {
    throw LocationError("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ") lies outside the mesh");
  }
  return {hit->triangle, {hit->barycentric[1], hit->barycentric[2]}};
}

std::vector<double> FieldEvaluator::scalar(const FunctionSpace& space, std::span<const double> coeffs,
                                           std::span<const Vec2> points) const {
  if (&space.mesh() != mesh_) throw InvalidArgument("space and evaluator use different meshes");
  if (space.components() != 1 || coeffs.size() != space.size()) throw InvalidArgument("coefficients do not match space");
  std::vector<double> out(points.size());
  std::vector<double> phi(space.nodes_per_cell());
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto [t, ref] = locate(points[k]);
    space.basis().values(ref[0], ref[1], phi);
    const auto nodes = space.cell_nodes(t);
    double v = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) v += coeffs[nodes[i]] * phi[i];
    out[k] = v;
  }
  return out;
}

std::vector<Vec2> FieldEvaluator::vector(const FunctionSpace& space, std::span<const double> coeffs,
                                         std::span<const Vec2> points) const {
  if (&space.mesh() != mesh_) throw InvalidArgument("space and evaluator use different meshes");
  if (space.components() != 2 || coeffs.size() != space.size()) throw InvalidArgument("coefficients do not match space");
  const std::size_t n = space.num_nodes();
  std::vector<Vec2> out(points.size());
  std::vector<double> phi(space.nodes_per_cell());
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto [t, ref] = locate(points[k]);
    space.basis().values(ref[0], ref[1], phi);
    const auto nodes = space.cell_nodes(t);
    Vec2 v;
    for (std::size_t i = 0; i < phi.size(); ++i) v += phi[i] * Vec2{coeffs[nodes[i]], coeffs[n + nodes[i]]};
    out[k] = v;
  }
  return out;
}

std::vector<double> evaluate_at_points(const FunctionSpace& space, std::span<const double> coeffs,
                                       std::span<const Vec2> points) {
  return FieldEvaluator(space.mesh()).scalar(space, coeffs, points);
}

}  // namespace bouss
