#include <cmath>

#include "bouss/error.hpp"
#include "bouss/fem.hpp"

namespace bouss {

namespace {

int qdeg_or_default(const FunctionSpace& space, int q) { return q > 0 ? q : 2 * space.degree() + 2; }

struct DepthSample {
  double D;
  Vec2 grad;
};

DepthSample sample_depth(const Bathymetry& bathymetry, Vec2 p) {
  const Jet j = bathymetry.jet(p);
  if (!(j.v > 0.0)) {
    throw InvalidArgument("depth must be positive; D(" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                          ") = " + std::to_string(j.v));
  }
  return {j.v, {j.dx, j.dy}};
}

// Physical gradients of all basis functions at quadrature point q.
void physical_gradients(const AffineMap& map, const ReferenceTable& tab, int q, std::vector<Vec2>& out) {
  out.resize(tab.nb);
  for (int i = 0; i < tab.nb; ++i) out[i] = map.gradient(tab.dxi[q * tab.nb + i], tab.deta[q * tab.nb + i]);
}

}  // namespace

SparseMatrix assemble_mass(const FunctionSpace& space, const ScalarFunction& weight, int quadrature_degree) {
  const ReferenceTable tab(space.basis(), triangle_rule(qdeg_or_default(space, quadrature_degree)));
  const auto& mesh = space.mesh();
  const int nb = tab.nb;
  const std::size_t n = space.num_nodes();
  std::vector<Triplet> trip;
  trip.reserve(mesh.num_triangles() * nb * nb * space.components());
  std::vector<double> local(static_cast<std::size_t>(nb) * nb);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const AffineMap map(mesh, t);
    std::fill(local.begin(), local.end(), 0.0);
    for (int q = 0; q < tab.nq; ++q) {
      const auto& qp = tab.points[q];
      double w = qp.weight * std::abs(map.det);
      if (weight) w *= weight(map.map(qp.xi, qp.eta));
      const double* phi = tab.phi.data() + q * nb;
      for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j) local[i * nb + j] += w * phi[i] * phi[j];
    }
    const auto nodes = space.cell_nodes(t);
    for (int c = 0; c < space.components(); ++c) {
      const int off = static_cast<int>(c * n);
      for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j) trip.push_back({off + nodes[i], off + nodes[j], local[i * nb + j]});
    }
  }
  return SparseMatrix::from_triplets(space.size(), trip);
}

SparseMatrix assemble_stiffness(const FunctionSpace& space, const ScalarFunction& weight, int quadrature_degree) {
  if (space.components() != 1) throw InvalidArgument("stiffness matrix needs a scalar space");
  const ReferenceTable tab(space.basis(), triangle_rule(qdeg_or_default(space, quadrature_degree)));
  const auto& mesh = space.mesh();
  const int nb = tab.nb;
  std::vector<Triplet> trip;
  trip.reserve(mesh.num_triangles() * nb * nb);
  std::vector<double> local(static_cast<std::size_t>(nb) * nb);
  std::vector<Vec2> g;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const AffineMap map(mesh, t);
    std::fill(local.begin(), local.end(), 0.0);
    for (int q = 0; q < tab.nq; ++q) {
      const auto& qp = tab.points[q];
      double w = qp.weight * std::abs(map.det);
      if (weight) w *= weight(map.map(qp.xi, qp.eta));
      physical_gradients(map, tab, q, g);
      for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j) local[i * nb + j] += w * dot(g[i], g[j]);
    }
    const auto nodes = space.cell_nodes(t);
    for (int i = 0; i < nb; ++i)
      for (int j = 0; j < nb; ++j) trip.push_back({nodes[i], nodes[j], local[i * nb + j]});
  }
  return SparseMatrix::from_triplets(space.size(), trip);
}

SparseMatrix assemble_directional_stiffness(const FunctionSpace& space, Vec2 direction, int quadrature_degree) {
  if (space.components() != 1) throw InvalidArgument("directional stiffness needs a scalar space");
  const ReferenceTable tab(space.basis(), triangle_rule(qdeg_or_default(space, quadrature_degree)));
  const auto& mesh = space.mesh();
  const int nb = tab.nb;
  std::vector<Triplet> trip;
  trip.reserve(mesh.num_triangles() * nb * nb);
  std::vector<double> local(static_cast<std::size_t>(nb) * nb);
  std::vector<Vec2> g;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const AffineMap map(mesh, t);
    std::fill(local.begin(), local.end(), 0.0);
    for (int q = 0; q < tab.nq; ++q) {
      const double w = tab.points[q].weight * std::abs(map.det);
      physical_gradients(map, tab, q, g);
      for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j) local[i * nb + j] += w * dot(g[i], direction) * dot(g[j], direction);
    }
    const auto nodes = space.cell_nodes(t);
    for (int i = 0; i < nb; ++i)
      for (int j = 0; j < nb; ++j) trip.push_back({nodes[i], nodes[j], local[i * nb + j]});
  }
  return SparseMatrix::from_triplets(space.size(), trip);
}

std::vector<Triplet> mixed_mass_triplets(const FunctionSpace& test, const FunctionSpace& trial, int quadrature_degree) {
  if (&test.mesh() != &trial.mesh()) throw InvalidArgument("mixed mass matrix needs spaces on one mesh");
  if (test.components() != 1 || trial.components() != 1) throw InvalidArgument("mixed mass matrix needs scalar spaces");
  const int qd = quadrature_degree > 0 ? quadrature_degree : test.degree() + trial.degree() + 2;
  const ReferenceTable ta(test.basis(), triangle_rule(qd));
  const ReferenceTable tb(trial.basis(), triangle_rule(qd));
  const auto& mesh = test.mesh();
  std::vector<Triplet> trip;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const AffineMap map(mesh, t);
    const auto ni = test.cell_nodes(t);
    const auto nj = trial.cell_nodes(t);
    for (int i = 0; i < ta.nb; ++i) {
      for (int j = 0; j < tb.nb; ++j) {
        double s = 0.0;
        for (int q = 0; q < ta.nq; ++q) s += ta.points[q].weight * ta.phi[q * ta.nb + i] * tb.phi[q * tb.nb + j];
        trip.push_back({ni[i], nj[j], s * std::abs(map.det)});
      }
    }
  }
  return trip;
}

SparseMatrix assemble_mass_operator(const FunctionSpace& space, const Bathymetry& bathymetry, const ModelSpec& model,
                                    int quadrature_degree) {
  if (space.components() != 1) throw InvalidArgument("mass operator needs a scalar space");
  const double kappa = model.mass_dispersion();
  const ReferenceTable tab(space.basis(), triangle_rule(qdeg_or_default(space, quadrature_degree)));
  const auto& mesh = space.mesh();
  const int nb = tab.nb;
  std::vector<Triplet> trip;
  trip.reserve(mesh.num_triangles() * nb * nb);
  std::vector<double> local(static_cast<std::size_t>(nb) * nb);
  std::vector<Vec2> g;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const AffineMap map(mesh, t);
    std::fill(local.begin(), local.end(), 0.0);
    for (int q = 0; q < tab.nq; ++q) {
      const auto& qp = tab.points[q];
      const double w = qp.weight * std::abs(map.det);
      const DepthSample ds = sample_depth(bathymetry, map.map(qp.xi, qp.eta));
      physical_gradients(map, tab, q, g);
      const double* phi = tab.phi.data() + q * nb;
      for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j)
          local[i * nb + j] += w * (phi[i] * phi[j] + kappa * ds.D * ds.D * dot(g[i], g[j]));
    }
    const auto nodes = space.cell_nodes(t);
    for (int i = 0; i < nb; ++i)
      for (int j = 0; j < nb; ++j) trip.push_back({nodes[i], nodes[j], local[i * nb + j]});
  }
  return SparseMatrix::from_triplets(space.size(), trip);
}

namespace {

SparseMatrix assemble_laplacian_momentum(const FunctionSpace& uspace, const Bathymetry& bathymetry, int qdeg) {
  const ReferenceTable tab(uspace.basis(), triangle_rule(qdeg));
  const auto& mesh = uspace.mesh();
  const int nb = tab.nb;
  const int n = static_cast<int>(uspace.num_nodes());
  std::vector<Triplet> trip;
  trip.reserve(mesh.num_triangles() * nb * nb * 2);
  std::vector<double> local(static_cast<std::size_t>(nb) * nb);
  std::vector<Vec2> g;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const AffineMap map(mesh, t);
    std::fill(local.begin(), local.end(), 0.0);
    for (int q = 0; q < tab.nq; ++q) {
      const auto& qp = tab.points[q];
      const double w = qp.weight * std::abs(map.det);
      const DepthSample ds = sample_depth(bathymetry, map.map(qp.xi, qp.eta));
      const Vec2 gradD2 = (2.0 * ds.D) * ds.grad;
      physical_gradients(map, tab, q, g);
      const double* phi = tab.phi.data() + q * nb;
      for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j)
          local[i * nb + j] +=
              w * (phi[i] * phi[j] + (ds.D * ds.D / 3.0) * dot(g[j], g[i]) + dot(gradD2, g[j]) * phi[i] / 3.0);
    }
    const auto nodes = uspace.cell_nodes(t);
    for (int c = 0; c < 2; ++c)
      for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j) trip.push_back({c * n + nodes[i], c * n + nodes[j], local[i * nb + j]});
  }
  auto A = SparseMatrix::from_triplets(uspace.size(), trip);
  std::vector<int> rows;
  for (int b : uspace.boundary_nodes()) {
    rows.push_back(b);
    rows.push_back(n + b);
  }
  A.set_identity_rows(rows);
  return A;
}

}  // namespace

SparseMatrix assemble_momentum_operator(const FunctionSpace& uspace, const Bathymetry& bathymetry, const ModelSpec& model,
                                        double nitsche_constant, int quadrature_degree) {
  if (uspace.components() != 2) throw InvalidArgument("momentum operator needs a vector space");
  if (!(nitsche_constant > 0.0)) throw InvalidArgument("Nitsche constant must be positive");
  const int qdeg = qdeg_or_default(uspace, quadrature_degree);
  if (model.kind == ModelKind::simplified) return assemble_laplacian_momentum(uspace, bathymetry, qdeg);

  const double b1 = model.beta1();
  const double b2 = model.beta2();
  const double bs = b1 + b2;
  const ReferenceTable tab(uspace.basis(), triangle_rule(qdeg));
  const auto& mesh = uspace.mesh();
  const int nb = tab.nb;
  const int n = static_cast<int>(uspace.num_nodes());
  const int ld = 2 * nb;  // local dof (c, i) -> c * nb + i
  std::vector<Triplet> trip;
  trip.reserve(mesh.num_triangles() * ld * ld + mesh.boundary_facets().size() * ld * ld);
  std::vector<double> local(static_cast<std::size_t>(ld) * ld);
  std::vector<Vec2> g;
  // Per local dof: value vector, div(D phi), div(phi), div(D^2 phi).
  std::vector<Vec2> val(ld);
  std::vector<double> divD(ld), div(ld), divD2(ld);

  auto scatter = [&](std::size_t t) {
    const auto nodes = uspace.cell_nodes(t);
    for (int a = 0; a < ld; ++a) {
      const int ga = (a / nb) * n + nodes[a % nb];
      for (int b = 0; b < ld; ++b) {
        const int gb = (b / nb) * n + nodes[b % nb];
        trip.push_back({ga, gb, local[a * ld + b]});
      }
    }
  };

  auto fill_dofs = [&](const double* phi, const std::vector<Vec2>& grads, const DepthSample& ds) {
    for (int c = 0; c < 2; ++c) {
      for (int i = 0; i < nb; ++i) {
        const int a = c * nb + i;
        const double dphi = c == 0 ? grads[i].x : grads[i].y;
        const double dD = c == 0 ? ds.grad.x : ds.grad.y;
        val[a] = c == 0 ? Vec2{phi[i], 0.0} : Vec2{0.0, phi[i]};
        div[a] = dphi;
        divD[a] = ds.D * dphi + phi[i] * dD;
        divD2[a] = ds.D * ds.D * dphi + 2.0 * ds.D * dD * phi[i];
      }
    }
  };

  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const AffineMap map(mesh, t);
    std::fill(local.begin(), local.end(), 0.0);
    for (int q = 0; q < tab.nq; ++q) {
      const auto& qp = tab.points[q];
      const double w = qp.weight * std::abs(map.det);
      const DepthSample ds = sample_depth(bathymetry, map.map(qp.xi, qp.eta));
      physical_gradients(map, tab, q, g);
      fill_dofs(tab.phi.data() + q * nb, g, ds);
      // Row a is the test function, column b the trial function.
      for (int a = 0; a < ld; ++a)
        for (int b = 0; b < ld; ++b)
          local[a * ld + b] += w * (dot(val[a], val[b]) - b1 * divD[b] * divD[a] - b2 * div[b] * divD2[a]);
    }
    scatter(t);
  }

  const auto& seg = segment_rule(qdeg);
  std::vector<double> phi(nb), dxi(nb), deta(nb);
  for (const auto& f : mesh.boundary_facets()) {
    const std::size_t t = f.triangle;
    const auto& tri = mesh.triangles()[t];
    int k = 0;
    while (!(tri[k] == f.v[0] && tri[(k + 1) % 3] == f.v[1])) ++k;
    const AffineMap map(mesh, t);
    const double penalty = nitsche_constant / f.length;
    std::fill(local.begin(), local.end(), 0.0);
    for (std::size_t q = 0; q < seg.nodes.size(); ++q) {
      const auto ref = edge_point(k, seg.nodes[q]);
      const double w = seg.weights[q] * f.length;
      uspace.basis().values(ref[0], ref[1], phi);
      uspace.basis().gradients(ref[0], ref[1], dxi, deta);
      g.resize(nb);
      for (int i = 0; i < nb; ++i) g[i] = map.gradient(dxi[i], deta[i]);
      const DepthSample ds = sample_depth(bathymetry, map.map(ref[0], ref[1]));
      fill_dofs(phi.data(), g, ds);
      for (int a = 0; a < ld; ++a) {
        const double Dvn_a = ds.D * dot(val[a], f.normal);
        const double gD_a = dot(val[a], ds.grad);
        for (int b = 0; b < ld; ++b) {
          const double Dvn_b = ds.D * dot(val[b], f.normal);
          const double gD_b = dot(val[b], ds.grad);
          const double v = bs * (divD[b] * Dvn_a + divD[a] * Dvn_b) - b2 * (gD_b * Dvn_a + gD_a * Dvn_b) -
                           bs * penalty * Dvn_b * Dvn_a;
          local[a * ld + b] += w * v;
        }
      }
    }
    scatter(t);
  }
  return SparseMatrix::from_triplets(uspace.size(), trip);
}

}  // namespace bouss
