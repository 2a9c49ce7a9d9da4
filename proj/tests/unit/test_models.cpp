#include <cmath>
#include <random>
#include <vector>

#include "bouss/error.hpp"
#include "bouss/models.hpp"
#include "bouss/rhs.hpp"
#include "bouss/sparse.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace bouss;

TEST_CASE("theta family coefficients") {
  const ModelSpec m = make_model(ModelKind::bbm);
  CHECK(m.theta == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-15));
  CHECK(m.a + m.b == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(m.c + m.d == doctest::Approx(-1.0 / 6.0).epsilon(1e-14));
  CHECK(m.mass_dispersion() == doctest::Approx(1.0 / 6.0).epsilon(1e-14));

  const ModelSpec one = make_model(ModelKind::bbm, 1.0);
  CHECK(one.c == 0.0);
  CHECK(one.d == 0.0);
  CHECK(one.a + one.b == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  std::mt19937 gen(2024);
  std::uniform_real_distribution<double> th(std::sqrt(1.0 / 3.0), 1.0);
  for (int i = 0; i < 100; ++i) {
    const double t = th(gen);
    const ModelSpec s = make_model(ModelKind::bbm, t);
    CHECK(s.a == doctest::Approx(t - 0.5).epsilon(1e-14));
    CHECK(s.b == doctest::Approx(0.5 * ((t - 1) * (t - 1) - 1.0 / 3.0)).epsilon(1e-14));
    CHECK(s.c == doctest::Approx(t - 1.0).epsilon(1e-14));
    CHECK(s.d == doctest::Approx(0.5 * (t - 1) * (t - 1)).epsilon(1e-14));
  }

  CHECK_THROWS_AS(make_model(ModelKind::bbm, 0.4), InvalidArgument);
  CHECK_THROWS_AS(make_model(ModelKind::bbm, 1.01), InvalidArgument);
  CHECK_THROWS_AS(make_model(ModelKind::classical, 0.9), InvalidArgument);
  CHECK_THROWS_AS(make_model(ModelKind::classical, std::nullopt, 0.0), InvalidArgument);
}

TEST_CASE("momentum operator coefficients") {
  CHECK(make_model(ModelKind::classical).beta1() == -0.5);
  CHECK(make_model(ModelKind::classical).beta2() == doctest::Approx(1.0 / 6.0));
  CHECK(make_model(ModelKind::modified).beta1() == 0.0);
  CHECK(make_model(ModelKind::modified).beta2() == doctest::Approx(-1.0 / 3.0));
  const ModelSpec b = make_model(ModelKind::bbm);
  CHECK(b.beta1() == doctest::Approx(std::sqrt(2.0 / 3.0) - 1.0).epsilon(1e-14));
  CHECK(b.beta2() == doctest::Approx(5.0 / 6.0 - std::sqrt(2.0 / 3.0)).epsilon(1e-14));
  CHECK(make_model(ModelKind::simplified).boundary() == BoundaryKind::no_slip);
  CHECK(make_model(ModelKind::classical).boundary() == BoundaryKind::slip);
  CHECK(make_model(ModelKind::classical).nonlinearity == Nonlinearity::advective);
  CHECK(make_model(ModelKind::modified).nonlinearity == Nonlinearity::conservative);
  CHECK(parse_model_kind("peregrine") == ModelKind::classical);
  CHECK(parse_model_kind("bbm") == ModelKind::bbm);
  CHECK_THROWS_AS(parse_model_kind("nwogu"), InvalidArgument);
  CHECK_THROWS_AS(parse_nonlinearity("upwind"), InvalidArgument);
}

TEST_CASE("phase speeds against high-precision values") {
  struct Row {
    double dk, bbm, peregrine, euler;
  };
  // 30-digit evaluations of the closed forms.
  const Row rows[] = {
      {0.5, 0.96, 0.960768922830522800900, 0.961371059747493916106},
      {1.0, 0.857142857142857142857, 0.866025403784438646764, 0.872693620897829691544},
      {2.0, 0.6, 0.654653670707977143798, 0.694272129671001874917},
      {5.0, 0.193548387096774193548, 0.327326835353988571899, 0.447193292495000450496},
  };
  for (const Row& r : rows) {
    CHECK(std::abs(phase_speed(DispersionFamily::bbm, r.dk) - r.bbm) < 1e-12);
    CHECK(std::abs(phase_speed(DispersionFamily::peregrine, r.dk) - r.peregrine) < 1e-12);
    CHECK(std::abs(phase_speed(DispersionFamily::euler, r.dk) - r.euler) < 1e-12);
  }
  for (auto f : {DispersionFamily::bbm, DispersionFamily::peregrine, DispersionFamily::euler}) {
    CHECK(phase_speed(f, 0.0) == 1.0);
    CHECK(phase_speed(f, 1e-6) == doctest::Approx(1.0).epsilon(1e-11));
  }
  CHECK_THROWS_AS(phase_speed(DispersionFamily::euler, -0.1), InvalidArgument);
}

TEST_CASE("bathymetries") {
  const auto bar = Bathymetry::submerged_bar();
  CHECK(bar.depth({13.0, 0.5}) == doctest::Approx(0.1));
  CHECK(bar.depth({0.0, 0.5}) == doctest::Approx(0.4));
  CHECK(bar.depth({6.0, 0.5}) == doctest::Approx(0.4));
  CHECK(bar.depth({9.0, 0.5}) == doctest::Approx(0.25));
  CHECK(bar.depth({17.0, 0.5}) == doctest::Approx(0.4));
  CHECK(bar.depth({30.0, 0.5}) == doctest::Approx(0.4));
  CHECK(bar.gradient({9.0, 0.3}).x == doctest::Approx(-0.05));
  CHECK(bar.gradient({15.0, 0.3}).x == doctest::Approx(0.1));

  const auto beach = Bathymetry::sloping_beach(0.7, 0.0, 1.0 / 50.0, 20.0);
  CHECK(beach.depth({-10.0, 0.5}) == doctest::Approx(0.7));
  CHECK(beach.depth({10.0, 0.5}) == doctest::Approx(0.5));
  CHECK(beach.depth({20.0, 0.5}) == doctest::Approx(0.3));
  CHECK_THROWS_AS(Bathymetry::sloping_beach(0.7, 0.0, 0.1, 20.0), InvalidArgument);

  const auto lin = Bathymetry::linear(1.5, -0.05, -0.05);
  CHECK(lin.depth({1.0, 1.0}) == doctest::Approx(1.4));
  CHECK(lin.gradient({0.3, 0.2}).y == doctest::Approx(-0.05));
  CHECK_FALSE(lin.is_flat());
  CHECK(Bathymetry::flat(2.0).is_flat());
  CHECK_THROWS_AS(Bathymetry::flat(0.0), InvalidArgument);
}

TEST_CASE("sponge profile") {
  const SpongeSpec s{{{0.0, -15.0}, {25.0, 35.0}}, 10.0};
  CHECK(s.damping(10.0) == 0.0);
  CHECK(s.damping(0.0) == 0.0);
  CHECK(s.damping(25.0) == 0.0);
  CHECK(s.damping(-15.0) == doctest::Approx(10.0));
  CHECK(s.damping(35.0) == doctest::Approx(10.0));
  CHECK(s.damping(30.0) == doctest::Approx(2.5));
  CHECK(s.damping(-7.5) == doctest::Approx(2.5));
  double prev = 0.0;
  for (double x = 25.0; x <= 35.0; x += 0.01) {
    const double m = s.damping(x);
    CHECK(m >= prev - 1e-15);
    CHECK(m - prev < 0.03);
    prev = m;
  }
}

TEST_CASE("wavemaker derivatives") {
  const WavemakerSpec w;
  CHECK(w.omega() == doctest::Approx(2.0 * M_PI / 2.02));
  const Vec2 p{2.3, 0.4};
  const double t = 0.77, h = 1e-5;
  CHECK(w.zeta({2.01, 0.0}, 0.0) == doctest::Approx(0.0095));
  CHECK(w.zeta(p, t) == doctest::Approx(0.0095 * std::exp(-4 * 0.29 * 0.29) * std::cos(w.omega() * t)));
  CHECK(w.zeta_t(p, t) == doctest::Approx((w.zeta(p, t + h) - w.zeta(p, t - h)) / (2 * h)).epsilon(1e-8));
  CHECK(w.zeta_tt(p, t) == doctest::Approx((w.zeta_t(p, t + h) - w.zeta_t(p, t - h)) / (2 * h)).epsilon(1e-8));
  const Vec2 dx{h, 0.0};
  CHECK(w.grad_zeta_t(p, t).x == doctest::Approx((w.zeta_t(p + dx, t) - w.zeta_t(p - dx, t)) / (2 * h)).epsilon(1e-8));
  CHECK(w.grad_zeta_t(p, t).y == 0.0);
  CHECK(w.grad_zeta_tt(p, t).x ==
        doctest::Approx((w.zeta_tt(p + dx, t) - w.zeta_tt(p - dx, t)) / (2 * h)).epsilon(1e-8));
}

namespace {

FieldState random_state(const Semidiscretization& s, unsigned seed, double scale = 0.1) {
  FieldState st = s.zero_state(0.3);
  st.eta = testing::random_vector(st.eta.size(), seed);
  st.u = testing::random_vector(st.u.size(), seed + 1);
  for (double& v : st.eta) v *= scale;
  for (double& v : st.u) v *= scale;
  return st;
}

double total(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

TEST_CASE("right-hand sides: trivial states") {
  const auto mesh = build_rectangle_mesh({0, 2, 0, 1}, 4, 2);
  for (ModelKind k : {ModelKind::classical, ModelKind::simplified, ModelKind::modified, ModelKind::bbm}) {
    const Semidiscretization s(mesh, make_model(k), Bathymetry::linear(1.5, -0.05, -0.05), {1, 2, 50.0, 0});
    FieldState z = s.zero_state();
    CHECK(testing::max_abs(s.rhs_mass(z)) == 0.0);
    CHECK(testing::max_abs(s.rhs_momentum(z)) == 0.0);
    std::fill(z.eta.begin(), z.eta.end(), 0.25);
    CHECK(testing::max_abs(s.rhs_mass(z)) == 0.0);
    CHECK(testing::max_abs(s.rhs_momentum(z)) < 1e-15);
  }
  const Semidiscretization flat(mesh, make_model(ModelKind::classical), Bathymetry::flat(1.0), {1, 2, 50.0, 0});
  FieldState c = flat.zero_state();
  for (std::size_t i = 0; i < c.u.size(); ++i) c.u[i] = i < c.u.size() / 2 ? 0.3 : -0.2;
  for (Nonlinearity nl : {Nonlinearity::advective, Nonlinearity::conservative}) {
    const Semidiscretization s(mesh, make_model(ModelKind::classical, std::nullopt, 9.81, nl), Bathymetry::flat(1.0),
                               {1, 2, 50.0, 0});
    CHECK(testing::max_abs(s.rhs_momentum(c)) < 1e-14);
  }
  CHECK_THROWS_AS(flat.rhs_mass(FieldState{{1.0}, {}, 0.0}), InvalidArgument);
}

TEST_CASE("flux form conserves mass") {
  const auto mesh = build_rectangle_mesh({0, 2, 0, 1}, 5, 3);
  for (ModelKind k : {ModelKind::classical, ModelKind::bbm}) {
    const Semidiscretization s(mesh, make_model(k), Bathymetry::linear(1.5, -0.05, -0.05), {2, 2, 50.0, 0});
    const auto st = random_state(s, 3);
    const auto f = s.rhs_mass(st);
    CHECK(std::abs(total(f)) < 1e-14 * (1.0 + testing::max_abs(f) * f.size()));
    // The mass operator preserves the total: 1^T A = 1^T M.
    const auto one = std::vector<double>(s.eta_space().size(), 1.0);
    const auto M = assemble_mass(s.eta_space());
    CHECK(testing::max_abs_diff(s.mass_operator() * one, M * one) < 1e-13);
  }
}

TEST_CASE("sponge is dissipative") {
  const auto mesh = build_rectangle_mesh({-15, 35, 0, 1}, 25, 2);
  const SpongeSpec sp{{{0.0, -15.0}, {25.0, 35.0}}, 10.0};
  const Semidiscretization with(mesh, make_model(ModelKind::bbm), Bathymetry::flat(0.4), {1, 2, 50.0, 0}, sp);
  const Semidiscretization without(mesh, make_model(ModelKind::bbm), Bathymetry::flat(0.4), {1, 2, 50.0, 0});
  for (unsigned seed : {1u, 2u, 3u}) {
    const auto st = random_state(with, seed);
    const auto dm = with.rhs_mass(st), dm0 = without.rhs_mass(st);
    const auto du = with.rhs_momentum(st), du0 = without.rhs_momentum(st);
    double power = 0.0;
    for (std::size_t i = 0; i < dm.size(); ++i) power += st.eta[i] * (dm[i] - dm0[i]);
    for (std::size_t i = 0; i < du.size(); ++i) power += st.u[i] * (du[i] - du0[i]);
    CHECK(power < 0.0);
  }
}

TEST_CASE("advective and conservative forms agree for irrotational flow") {
  auto gap = [](int n) {
    const auto mesh = build_rectangle_mesh({0, 1, 0, 1}, n, n);
    const Semidiscretization adv(mesh, make_model(ModelKind::classical, std::nullopt, 1.0, Nonlinearity::advective),
                                 Bathymetry::flat(1.0), {1, 2, 50.0, 0});
    const Semidiscretization con(mesh, make_model(ModelKind::classical, std::nullopt, 1.0, Nonlinearity::conservative),
                                 Bathymetry::flat(1.0), {1, 2, 50.0, 0});
    FieldState st = adv.zero_state();
    // u = grad(sin x cos y)
    st.u = interpolate(adv.u_space(), VectorFunction([](Vec2 p) {
                         return Vec2{std::cos(p.x) * std::cos(p.y), -std::sin(p.x) * std::sin(p.y)};
                       }));
    auto d = adv.rhs_momentum(st);
    const auto c = con.rhs_momentum(st);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] -= c[i];
    const DirectSolver M(assemble_mass(adv.u_space()));
    return l2_norm(FunctionSpace(mesh, 2), std::span<const double>(M.solve(d)).first(adv.u_space().num_nodes()));
  };
  const double e4 = gap(4), e8 = gap(8), e16 = gap(16);
  CHECK(e8 < 0.5 * e4);
  CHECK(e16 < 0.5 * e8);
}
