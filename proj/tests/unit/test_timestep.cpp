#include <cmath>
#include <limits>
#include <vector>

#include "bouss/error.hpp"
#include "bouss/timestep.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace bouss;

namespace {

FieldState bump(const Semidiscretization& s, double amp = 0.05) {
  FieldState st = s.zero_state();
  st.eta = l2_project(s.eta_space(), ScalarFunction([amp](Vec2 p) {
                        return amp * std::exp(-8.0 * ((p.x - 0.5) * (p.x - 0.5) + (p.y - 0.4) * (p.y - 0.4)));
                      }));
  st.u = l2_project(s.u_space(), VectorFunction([amp](Vec2 p) {
                      return Vec2{amp * std::sin(M_PI * p.x) * p.y, -amp * p.x * std::sin(M_PI * p.y)};
                    }));
  s.apply_velocity_constraints(st.u);
  return st;
}

IntegratorOptions opts(double dt, LinearSolverKind k = LinearSolverKind::direct) {
  IntegratorOptions o;
  o.dt = dt;
  o.solver = k;
  return o;
}

}  // namespace

TEST_CASE("trivial states stay put") {
  const auto mesh = build_rectangle_mesh({0, 1, 0, 1}, 4, 4);
  const Semidiscretization s(mesh, make_model(ModelKind::bbm), Bathymetry::flat(1.0));
  Integrator integ(s, opts(0.01));
  const FieldState z = s.zero_state();
  const FieldState z1 = rk4_step(integ, z);
  CHECK(testing::max_abs(z1.eta) == 0.0);
  CHECK(testing::max_abs(z1.u) == 0.0);
  CHECK(z1.time == doctest::Approx(0.01));

  FieldState c = s.zero_state();
  std::fill(c.eta.begin(), c.eta.end(), 0.2);
  Integrator integ2(s, opts(0.01));
  const FieldState c1 = rk4_step(integ2, c);
  CHECK(testing::max_abs_diff(c1.eta, c.eta) < 1e-14);
  CHECK(testing::max_abs(c1.u) < 1e-14);
}

TEST_CASE("mass is conserved across steps") {
  const auto mesh = build_rectangle_mesh({0, 1, 0, 1}, 6, 6);
  for (ModelKind k : {ModelKind::classical, ModelKind::simplified, ModelKind::modified, ModelKind::bbm}) {
    const Semidiscretization s(mesh, make_model(k), Bathymetry::linear(1.5, -0.05, -0.05), {1, 2, 50.0, 0});
    for (auto solver : {LinearSolverKind::direct, LinearSolverKind::iterative}) {
      Integrator integ(s, opts(0.01, solver));
      FieldState st = bump(s);
      const double m0 = s.total_mass(st.eta);
      for (int n = 0; n < 5; ++n) st = rk4_step(integ, st);
      CAPTURE(to_string(k));
      CHECK(std::abs(s.total_mass(st.eta) - m0) < 1e-10 * std::abs(m0));
      CHECK(std::abs(integ.last_step_mass_source()) < 1e-12);
    }
  }
}

TEST_CASE("no-slip models keep boundary velocities at zero") {
  const auto mesh = build_rectangle_mesh({0, 1, 0, 1}, 4, 4);
  const Semidiscretization s(mesh, make_model(ModelKind::simplified), Bathymetry::flat(1.0), {1, 2, 50.0, 0});
  CHECK(s.constrained_velocity_dofs().size() == 2 * s.u_space().boundary_nodes().size());
  Integrator integ(s, opts(0.01));
  FieldState st = bump(s);
  for (int n = 0; n < 3; ++n) st = rk4_step(integ, st);
  for (int d : s.constrained_velocity_dofs()) CHECK(st.u[d] == 0.0);
}

TEST_CASE("steps are deterministic and solver independent") {
  const auto mesh = build_rectangle_mesh({0, 1, 0, 1}, 5, 5);
  const Semidiscretization s(mesh, make_model(ModelKind::classical), Bathymetry::linear(1.5, -0.05, -0.05));
  Integrator a(s, opts(0.02)), b(s, opts(0.02));
  IntegratorOptions io = opts(0.02, LinearSolverKind::iterative);
  io.iterative.tol = 1e-13;
  Integrator c(s, io);
  FieldState sa = bump(s), sb = sa, sc = sa;
  for (int n = 0; n < 4; ++n) {
    sa = rk4_step(a, sa);
    sb = rk4_step(b, sb);
    sc = rk4_step(c, sc);
  }
  CHECK(sa.eta == sb.eta);
  CHECK(sa.u == sb.u);
  CHECK(testing::max_abs_diff(sa.eta, sc.eta) < 1e-10);
  CHECK(testing::max_abs_diff(sa.u, sc.u) < 1e-10);
  CHECK(c.last_report().converged);
  CHECK(c.last_report().iterations > 0);
}

TEST_CASE("fourth order in time") {
  const auto mesh = build_rectangle_mesh({0, 1, 0, 1}, 4, 4, DiagonalPattern::crossed);
  const Semidiscretization s(mesh, make_model(ModelKind::bbm, std::nullopt, 1.0), Bathymetry::flat(1.0),
                             {1, 1, 50.0, 0});
  const FieldState start = bump(s, 0.1);
  auto run = [&](int steps) {
    Integrator integ(s, opts(0.8 / steps));
    FieldState st = start;
    for (int n = 0; n < steps; ++n) st = rk4_step(integ, st);
    return st;
  };
  const FieldState ref = run(256);
  std::vector<double> err;
  for (int steps : {8, 16, 32}) {
    auto e = run(steps).eta;
    for (std::size_t i = 0; i < e.size(); ++i) e[i] -= ref.eta[i];
    err.push_back(l2_norm(s.eta_space(), e));
  }
  for (std::size_t i = 1; i < err.size(); ++i) {
    const double slope = std::log2(err[i - 1] / err[i]);
    CAPTURE(slope);
    CHECK(slope == doctest::Approx(4.0).epsilon(0.05));
  }
}

TEST_CASE("forcing and mass sources") {
  const auto mesh = build_rectangle_mesh({0, 2, 0, 1}, 4, 2);
  const Semidiscretization s(mesh, make_model(ModelKind::bbm), Bathymetry::flat(1.0));
  Integrator integ(s, opts(0.1));
  const auto load = assemble_load(s.eta_space(), ScalarFunction([](Vec2) { return 0.5; }));
  integ.set_forcing([&](double, std::vector<double>& fm, std::vector<double>&) {
    for (std::size_t i = 0; i < fm.size(); ++i) fm[i] += load[i];
  });
  const FieldState st = rk4_step(integ, s.zero_state());
  // d/dt of the total mass is 0.5 * area = 1.
  CHECK(s.total_mass(st.eta) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(integ.last_step_mass_source() == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("blow-up detection and solver failures") {
  const auto mesh = build_rectangle_mesh({0, 1, 0, 1}, 3, 3);
  const Semidiscretization s(mesh, make_model(ModelKind::bbm), Bathymetry::flat(1.0));
  Integrator integ(s, opts(0.01));
  FieldState bad = bump(s);
  bad.eta[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(rk4_step(integ, bad), BlowUpError);

  IntegratorOptions tight = opts(0.01);
  tight.reference_amplitude = 1e-9;
  Integrator small(s, tight);
  try {
    rk4_step(small, bump(s));
    FAIL("expected BlowUpError");
  } catch (const BlowUpError& e) {
    CHECK(e.time() == doctest::Approx(0.01));
  }

  IntegratorOptions it = opts(0.01, LinearSolverKind::iterative);
  it.iterative.max_iterations = 1;
  it.iterative.tol = 1e-15;
  Integrator weak(s, it);
  CHECK_THROWS_AS(rk4_step(weak, bump(s)), IntegrationError);
}

TEST_CASE("Courant number") {
  CHECK(courant_number(0.0, 1.0, 1.0, 0.1, 0.1) == doctest::Approx(1.0));
  CHECK(courant_number(0.3, 1.0, 1.0, 0.09, 0.09) == doctest::Approx(std::sqrt(1.3)));
  CHECK(courant_number(0.3, 1.0, 1.0, 0.09, 0.09) == doctest::Approx(1.140).epsilon(1e-3));
  CHECK_THROWS_AS(courant_number(0.0, 1.0, 1.0, 0.1, 0.0), InvalidArgument);
  CHECK_THROWS_AS(courant_number(-1.0, 1.0, 1.0, 0.1, 0.1), InvalidArgument);
}
