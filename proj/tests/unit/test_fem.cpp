#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "bouss/error.hpp"
#include "bouss/fem.hpp"
#include "bouss/verify.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace bouss;
using std::numbers::pi;

namespace {

double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

// Direct basis sum on a brute-force located cell.
double basis_sum(const FunctionSpace& s, const std::vector<double>& c, Vec2 p) {
  const auto& m = s.mesh();
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const AffineMap F(m, t);
    const Vec2 d = p - F.origin;
    const double xi = F.i00 * d.x + F.i01 * d.y;
    const double eta = F.i10 * d.x + F.i11 * d.y;
    if (xi < -1e-12 || eta < -1e-12 || xi + eta > 1 + 1e-12) continue;
    std::vector<double> phi(static_cast<std::size_t>(s.nodes_per_cell()));
    s.basis().values(xi, eta, phi);
    double v = 0.0;
    const auto nodes = s.cell_nodes(t);
    for (std::size_t i = 0; i < phi.size(); ++i) v += phi[i] * c[static_cast<std::size_t>(nodes[i])];
    return v;
  }
  throw LocationError("outside");
}

}  // namespace

TEST_CASE("function space node counts and continuity") {
  const auto m = build_rectangle_mesh({0, 2, 0, 1}, 3, 2);
  const std::size_t V = m.num_vertices(), E = m.num_edges(), T = m.num_triangles();
  CHECK(FunctionSpace(m, 1).num_nodes() == V);
  CHECK(FunctionSpace(m, 2).num_nodes() == V + E);
  CHECK(FunctionSpace(m, 3).num_nodes() == V + 2 * E + T);
  CHECK(FunctionSpace(m, 2, 2).size() == 2 * (V + E));
  CHECK_THROWS_AS(FunctionSpace(m, 1, 3), InvalidArgument);

  for (int r = 1; r <= 3; ++r) {
    const FunctionSpace s(m, r);
    for (std::size_t v = 0; v < V; ++v) CHECK(s.node_coordinates()[v] == m.vertices()[v]);
    // Each cell's nodes sit at the mapped reference nodes, so shared nodes agree across cells.
    for (std::size_t t = 0; t < T; ++t) {
      const AffineMap F(m, t);
      const auto nodes = s.cell_nodes(t);
      for (int i = 0; i < s.nodes_per_cell(); ++i) {
        const auto& ref = s.basis().nodes()[i];
        CHECK(norm(F.map(ref[0], ref[1]) - s.node_coordinates()[nodes[i]]) < 1e-14);
      }
    }
    // Boundary nodes: 2 (nx + ny) r on the rectangle.
    CHECK(s.boundary_nodes().size() == static_cast<std::size_t>(2 * (3 + 2) * r));
  }
}

TEST_CASE("mass and stiffness matrices") {
  const auto m = build_rectangle_mesh({0, 2, 0, 1}, 2, 2);
  for (int r = 1; r <= 3; ++r) {
    const FunctionSpace s(m, r);
    const auto M = assemble_mass(s);
    CHECK(M.asymmetry() < 1e-14);
    CHECK(sum(M.values()) == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(testing::min_eigenvalue(M) > 0.0);
    const auto K = assemble_stiffness(s);
    const auto k1 = K * std::vector<double>(s.size(), 1.0);
    CHECK(testing::max_abs(k1) < 1e-12);
    CHECK(testing::min_eigenvalue(K) > -1e-12);
    // (grad x, grad x) = area.
    std::vector<double> x(s.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = s.node_coordinates()[i].x;
    CHECK(dot(x, K * x) == doctest::Approx(2.0).epsilon(1e-13));

    const FunctionSpace v(m, r, 2);
    const auto Mv = assemble_mass(v);
    CHECK(sum(Mv.values()) == doctest::Approx(4.0).epsilon(1e-13));
  }
  const FunctionSpace p1(m, 1), p2(m, 2);
  double mixed = 0.0;
  for (const auto& t : mixed_mass_triplets(p1, p2)) mixed += t.value;
  CHECK(mixed == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("mass operator") {
  const auto m = build_rectangle_mesh({0, 1, 0, 1}, 2, 2);
  const FunctionSpace s(m, 2);
  const auto flat = Bathymetry::flat(1.0);
  const auto M = assemble_mass(s);
  for (ModelKind k : {ModelKind::classical, ModelKind::simplified, ModelKind::modified}) {
    const auto A = assemble_mass_operator(s, flat, make_model(k));
    CHECK(testing::max_abs_diff(A.values(), M.values()) < 1e-15);
  }
  const auto B = assemble_mass_operator(s, flat, make_model(ModelKind::bbm));
  const std::vector<double> c(s.size(), 2.5);
  CHECK(testing::max_abs_diff(B * c, M * c) < 1e-13);
  CHECK(B.asymmetry() < 1e-14);
  CHECK(testing::min_eigenvalue(B) > 0.0);
  const auto Bs = assemble_mass_operator(s, Bathymetry::linear(1.5, -0.05, -0.05), make_model(ModelKind::bbm));
  CHECK(testing::min_eigenvalue(Bs) > 0.0);
}

TEST_CASE("momentum operator structure") {
  const auto m = build_rectangle_mesh({0, 1, 0, 1}, 3, 3);
  const FunctionSpace us(m, 2, 2);
  const auto flat = Bathymetry::flat(1.0);
  for (ModelKind k : {ModelKind::classical, ModelKind::modified, ModelKind::bbm}) {
    const auto C = assemble_momentum_operator(us, flat, make_model(k), 50.0);
    CHECK(C.asymmetry() < 1e-12);
    CHECK(testing::min_eigenvalue(C) > 0.0);
    CHECK(testing::max_abs(C * std::vector<double>(us.size(), 0.0)) == 0.0);
  }
  const auto Cs = assemble_momentum_operator(us, Bathymetry::linear(1.5, -0.05, -0.05), make_model(ModelKind::classical),
                                             50.0);
  CHECK(Cs.asymmetry() > 1e-8);
  CHECK_THROWS_AS(assemble_momentum_operator(us, flat, make_model(ModelKind::classical), 0.0), InvalidArgument);
  CHECK_THROWS_AS(assemble_momentum_operator(FunctionSpace(m, 1), flat, make_model(ModelKind::classical), 50.0),
                  InvalidArgument);

  // Simplified model: strong u = 0 rows on every boundary node.
  const auto S = assemble_momentum_operator(us, flat, make_model(ModelKind::simplified), 50.0);
  const std::size_t n = us.num_nodes();
  for (int b : us.boundary_nodes()) {
    for (std::size_t comp = 0; comp < 2; ++comp) {
      const std::size_t row = comp * n + static_cast<std::size_t>(b);
      CHECK(S.at(row, row) == 1.0);
      CHECK(S.at(row, (row + 1) % S.rows()) == 0.0);
    }
  }
}

TEST_CASE("load vectors") {
  const auto m = build_rectangle_mesh({0, 3, 0, 1}, 3, 2);
  for (int r = 1; r <= 3; ++r) {
    const FunctionSpace s(m, r);
    CHECK(testing::max_abs(assemble_load(s, ScalarFunction([](Vec2) { return 0.0; }))) == 0.0);
    CHECK(sum(assemble_load(s, ScalarFunction([](Vec2) { return 1.0; }))) == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(sum(assemble_load(s, ScalarFunction([](Vec2 p) { return p.x * p.y; }))) ==
          doctest::Approx(2.25).epsilon(1e-13));
  }
  const FunctionSpace v(m, 2, 2);
  CHECK(sum(assemble_load(v, VectorFunction([](Vec2) { return Vec2{1.0, 2.0}; }))) ==
        doctest::Approx(9.0).epsilon(1e-13));
  CHECK_THROWS_AS(assemble_load(v, ScalarFunction([](Vec2) { return 1.0; })), InvalidArgument);
}

TEST_CASE("L2 projection") {
  const auto m = build_rectangle_mesh({0, 1, 0, 1}, 4, 4);
  for (int r = 1; r <= 3; ++r) {
    const FunctionSpace s(m, r);
    const auto one = l2_project(s, ScalarFunction([](Vec2) { return 1.0; }));
    for (double c : one) CHECK(c == doctest::Approx(1.0).epsilon(1e-9));
  }
  const FunctionSpace p1(m, 1);
  const auto x = l2_project(p1, ScalarFunction([](Vec2 p) { return p.x; }));
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(x[i] == doctest::Approx(p1.node_coordinates()[i].x).epsilon(1e-9));

  // Third order in L2 for P2; the ratio only approaches 8 from below on these meshes.
  auto err = [](int n) {
    const auto mesh = build_rectangle_mesh({0, 1, 0, 1}, n, n);
    const FunctionSpace s(mesh, 2);
    const auto c = l2_project(s, ScalarFunction([](Vec2 p) { return std::sin(pi * p.x); }));
    return error_norms(s, c, ScalarJetFunction([](Vec2 p) { return sin(pi * Jet::x(p.x)); })).l2;
  };
  const double ratio = err(32) / err(64);
  CHECK(ratio == doctest::Approx(8.0).epsilon(0.05));
}

TEST_CASE("error norms") {
  const auto m = build_rectangle_mesh({0, 1, 0, 1}, 3, 3);
  for (int r = 1; r <= 3; ++r) {
    const FunctionSpace s(m, r);
    const auto poly = [r](Vec2 p) { return std::pow(p.x, r) + 2.0 * std::pow(p.y, r - 1) * p.x - 0.5; };
    const auto jet = [r](Vec2 p) {
      const Jet x = Jet::x(p.x), y = Jet::y(p.y);
      Jet xr = 1.0, yr = 1.0;
      for (int k = 0; k < r; ++k) xr = xr * x;
      for (int k = 0; k < r - 1; ++k) yr = yr * y;
      return xr + 2.0 * yr * x - 0.5;
    };
    const auto c = interpolate(s, ScalarFunction(poly));
    const auto e = error_norms(s, c, ScalarJetFunction(jet));
    CHECK(e.l2 < 1e-10);
    CHECK(e.h1 < 1e-10);

    const FunctionSpace v(m, r, 2);
    const auto cv = interpolate(v, VectorFunction([&](Vec2 p) { return Vec2{poly(p), -poly(p)}; }));
    const auto ev = error_norms(v, cv, VectorJetFunction([&](Vec2 p) { return std::array<Jet, 2>{jet(p), -jet(p)}; }));
    CHECK(ev.l2 < 1e-10);
    CHECK(ev.hdiv < 1e-10);
  }
  const FunctionSpace s(m, 1);
  const auto e = error_norms(s, std::vector<double>(s.size(), 0.0), ScalarJetFunction([](Vec2) { return Jet(1.0); }));
  CHECK(e.l2 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(e.h1 == doctest::Approx(1.0).epsilon(1e-14));

  // Manufactured velocity field: default quadrature against a much finer rule.
  const auto mesh = build_rectangle_mesh({0, 1, 0, 1}, 16, 16);
  const FunctionSpace v(mesh, 2, 2);
  const auto exact = [](Vec2 p) { return elliptic_exact(p); };
  const auto c = l2_project(v, VectorFunction([&](Vec2 p) {
                              const auto u = exact(p);
                              return Vec2{u[0].v, u[1].v};
                            }));
  const auto coarse = error_norms(v, c, VectorJetFunction(exact));
  const auto fine = error_norms(v, c, VectorJetFunction(exact), 20);
  // Good to about five digits, far more than an EOC needs.
  CHECK(std::abs(coarse.l2 - fine.l2) < 1e-4 * fine.l2);
  CHECK(std::abs(coarse.h1 - fine.h1) < 1e-4 * fine.h1);
  CHECK(std::abs(coarse.hdiv - fine.hdiv) < 1e-4 * fine.hdiv);
}

TEST_CASE("point evaluation") {
  const auto m = build_rectangle_mesh({0, 1, 0, 1}, 4, 4);
  const FunctionSpace p1(m, 1);
  const FieldEvaluator ev(m);
  const auto c = interpolate(p1, ScalarFunction([](Vec2 p) { return p.x + p.y; }));
  const std::vector<Vec2> pts{{0.25, 0.5}};
  CHECK(ev.scalar(p1, c, pts)[0] == doctest::Approx(0.75).epsilon(1e-14));
  const auto k = interpolate(p1, ScalarFunction([](Vec2) { return -3.0; }));
  const std::vector<Vec2> many{{0.1, 0.9}, {0.0, 0.0}, {1.0, 1.0}, {0.77, 0.31}};
  for (double v : ev.scalar(p1, k, many)) CHECK(v == -3.0);

  const auto mesh2 = build_rectangle_mesh({-1, 2, 0, 1}, 5, 3);
  const FunctionSpace p2(mesh2, 2);
  const auto f = testing::random_vector(p2.size(), 5);
  std::mt19937 gen(9);
  std::uniform_real_distribution<double> ux(-1.0, 2.0), uy(0.0, 1.0);
  std::vector<Vec2> rp;
  for (int i = 0; i < 50; ++i) rp.push_back({ux(gen), uy(gen)});
  const auto got = evaluate_at_points(p2, f, rp);
  for (std::size_t i = 0; i < rp.size(); ++i) CHECK(std::abs(got[i] - basis_sum(p2, f, rp[i])) < 1e-12);

  const FunctionSpace v2(mesh2, 2, 2);
  const auto cv = interpolate(v2, VectorFunction([](Vec2 p) { return Vec2{p.x * p.x, p.x * p.y}; }));
  const FieldEvaluator ev2(mesh2);
  const auto vv = ev2.vector(v2, cv, rp);
  for (std::size_t i = 0; i < rp.size(); ++i) {
    CHECK(vv[i].x == doctest::Approx(rp[i].x * rp[i].x).epsilon(1e-12));
    CHECK(vv[i].y == doctest::Approx(rp[i].x * rp[i].y).epsilon(1e-12));
  }
  const std::vector<Vec2> outside{{2.5, 0.5}};
  CHECK_THROWS_AS(evaluate_at_points(p2, f, outside), LocationError);
  CHECK_THROWS_AS(ev.scalar(p2, f, pts), InvalidArgument);
}

TEST_CASE("integration and discretization checks") {
  const auto m = build_rectangle_mesh({0, 2, 0, 3}, 2, 3);
  const FunctionSpace s(m, 3);
  CHECK(integrate(s, std::vector<double>(s.size(), 1.0)) == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(l2_norm(s, std::vector<double>(s.size(), 1.0)) == doctest::Approx(std::sqrt(6.0)).epsilon(1e-14));
  Discretization d;
  CHECK(d.effective_quadrature_degree() == 6);
  d.r1 = 4;
  CHECK_THROWS_AS(d.validate(), InvalidArgument);
  d = Discretization{};
  d.quadrature_degree = 3;
  CHECK_THROWS_AS(d.validate(), InvalidArgument);
  d = Discretization{};
  d.nitsche_constant = -1.0;
  CHECK_THROWS_AS(d.validate(), InvalidArgument);
}
