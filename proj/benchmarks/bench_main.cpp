#include <benchmark/benchmark.h>

#include <cmath>

#include "bouss/fem.hpp"
#include "bouss/mesh.hpp"
#include "bouss/rhs.hpp"
#include "bouss/solitary.hpp"
#include "bouss/timestep.hpp"

namespace {

bouss::Triangulation channel(int nx) { return bouss::build_rectangle_mesh({-20.0, 30.0, -1.0, 1.0}, nx, nx / 25); }

void BM_AssembleMomentum(benchmark::State& st) {
  const auto mesh = channel(static_cast<int>(st.range(0)));
  const bouss::FunctionSpace us(mesh, static_cast<int>(st.range(1)), 2);
  const auto model = bouss::make_model(bouss::ModelKind::bbm, std::nullopt, 1.0);
  const auto bath = bouss::Bathymetry::flat(1.0);
  for (auto _ : st) benchmark::DoNotOptimize(bouss::assemble_momentum_operator(us, bath, model, 50.0));
  st.counters["dofs"] = static_cast<double>(us.size());
}
BENCHMARK(BM_AssembleMomentum)->Args({250, 1})->Args({250, 2})->Unit(benchmark::kMillisecond);

struct Setup {
  bouss::Triangulation mesh;
  bouss::Semidiscretization system;
  bouss::FieldState state;

  Setup(int nx, int r2)
      : mesh(channel(nx)),
        system(mesh, bouss::make_model(bouss::ModelKind::bbm, std::nullopt, 1.0), bouss::Bathymetry::flat(1.0),
               bouss::Discretization{1, r2, 50.0, 0}) {
    state = system.zero_state();
    state.eta = bouss::interpolate(system.eta_space(), [](bouss::Vec2 p) { return 0.1 / std::cosh(0.3 * p.x); });
  }
};

void BM_RhsEvaluation(benchmark::State& st) {
  Setup s(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  for (auto _ : st) {
    benchmark::DoNotOptimize(s.system.rhs_mass(s.state));
    benchmark::DoNotOptimize(s.system.rhs_momentum(s.state));
  }
}
BENCHMARK(BM_RhsEvaluation)->Args({250, 1})->Args({250, 2})->Unit(benchmark::kMillisecond);

void BM_Rk4Step(benchmark::State& st) {
  Setup s(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  bouss::IntegratorOptions opt;
  opt.dt = 0.1;
  opt.solver = st.range(2) ? bouss::LinearSolverKind::iterative : bouss::LinearSolverKind::direct;
  bouss::Integrator integ(s.system, opt);
  for (auto _ : st) benchmark::DoNotOptimize(bouss::rk4_step(integ, s.state));
}
BENCHMARK(BM_Rk4Step)->Args({250, 1, 0})->Args({250, 2, 0})->Args({250, 1, 1})->Unit(benchmark::kMillisecond);

void BM_Petviashvili(benchmark::State& st) {
  const auto mesh = channel(250);
  const bouss::FunctionSpace es(mesh, 1);
  const bouss::FunctionSpace us(mesh, 1, 2);
  bouss::SolitaryWaveProblem p;
  p.gravity = 1.0;
  const auto model = bouss::make_model(bouss::ModelKind::bbm, std::nullopt, 1.0);
  for (auto _ : st) {
    if (st.range(0)) {
      benchmark::DoNotOptimize(bouss::petviashvili_bbm(p, model, es, us));
    } else {
      benchmark::DoNotOptimize(bouss::petviashvili_peregrine(p, us));
    }
  }
}
BENCHMARK(BM_Petviashvili)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
