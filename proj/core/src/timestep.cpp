#include "bouss/timestep.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bouss {

Integrator::Integrator(const Semidiscretization& system, IntegratorOptions options)
    : system_(&system), options_(options) {
  if (!(options_.dt > 0.0)) throw InvalidArgument("time step must be positive");
  if (options_.solver == LinearSolverKind::direct) {
    mass_lu_ = std::make_unique<DirectSolver>(system.mass_operator());
    momentum_lu_ = std::make_unique<DirectSolver>(system.momentum_operator());
  }
  momentum_symmetric_ = system.momentum_operator().asymmetry() < 1e-12;
  guess_eta_.assign(system.eta_space().size(), 0.0);
  guess_u_.assign(system.u_space().size(), 0.0);
  if (options_.reference_amplitude > 0.0) reference_ = options_.reference_amplitude;
}

Integrator::~Integrator() = default;
Integrator::Integrator(Integrator&&) noexcept = default;

std::vector<double> Integrator::solve(int which, const std::vector<double>& rhs, std::vector<double>& guess) {
  const SparseMatrix& A = which == 0 ? system_->mass_operator() : system_->momentum_operator();
  SolverReport report;
  std::vector<double> x;
  if (options_.solver == LinearSolverKind::direct) {
    x = (which == 0 ? mass_lu_ : momentum_lu_)->solve(rhs);
    const auto Ax = A * x;
    double r2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) r2 += (rhs[i] - Ax[i]) * (rhs[i] - Ax[i]);
    const double bn = norm2(rhs);
    report = {1, bn > 0.0 ? std::sqrt(r2) / bn : 0.0, true};
  } else {
    const bool spd = which == 0 || momentum_symmetric_;
    auto res = spd ? cg_solve(A, rhs, options_.iterative, guess) : bicgstab_solve(A, rhs, options_.iterative, guess);
    report = res.report;
    if (!report.converged) {
      throw IntegrationError(std::string(which == 0 ? "mass" : "momentum") + " stage solve did not converge", report);
    }
    x = std::move(res.x);
    guess = x;
  }
  if (report.final_residual > last_report_.final_residual || last_report_.iterations == 0) {
    last_report_.final_residual = std::max(last_report_.final_residual, report.final_residual);
  }
  last_report_.iterations = std::max(last_report_.iterations, report.iterations);
  last_report_.converged = last_report_.converged && report.converged;
  return x;
}

Integrator::Derivative Integrator::evaluate(const FieldState& s) {
  auto fs = system_->rhs_mass(s);
  auto fu = system_->rhs_momentum(s);
  if (forcing_) {
    forcing_(s.time, fs, fu);
    for (int d : system_->constrained_velocity_dofs()) fu[d] = 0.0;
  }
  Derivative d;
  // Test functions sum to one, so the entries sum to d/dt of the total mass.
  d.source = std::accumulate(fs.begin(), fs.end(), 0.0);
  d.eta = solve(0, fs, guess_eta_);
  d.u = solve(1, fu, guess_u_);
  return d;
}

FieldState Integrator::step(const FieldState& s) {
  const double dt = options_.dt;
  last_report_ = {0, 0.0, true};
  if (reference_ < 0.0) {
    double m = 0.0;
    for (double v : s.eta) m = std::max(m, std::abs(v));
    reference_ = m;
  }
  auto axpy = [](const FieldState& base, const Derivative& k, double h, double t) {
    FieldState out;
    out.time = t;
    out.eta.resize(base.eta.size());
    out.u.resize(base.u.size());
    for (std::size_t i = 0; i < base.eta.size(); ++i) out.eta[i] = base.eta[i] + h * k.eta[i];
    for (std::size_t i = 0; i < base.u.size(); ++i) out.u[i] = base.u[i] + h * k.u[i];
    return out;
  };
  const Derivative k1 = evaluate(s);
  const Derivative k2 = evaluate(axpy(s, k1, 0.5 * dt, s.time + 0.5 * dt));
  const Derivative k3 = evaluate(axpy(s, k2, 0.5 * dt, s.time + 0.5 * dt));
  const Derivative k4 = evaluate(axpy(s, k3, dt, s.time + dt));

  FieldState out;
  out.time = s.time + dt;
  out.eta.resize(s.eta.size());
  out.u.resize(s.u.size());
  const double w = dt / 6.0;
  double amax = 0.0;
  bool finite = true;
  for (std::size_t i = 0; i < s.eta.size(); ++i) {
    out.eta[i] = s.eta[i] + w * (k1.eta[i] + 2.0 * k2.eta[i] + 2.0 * k3.eta[i] + k4.eta[i]);
    finite = finite && std::isfinite(out.eta[i]);
    amax = std::max(amax, std::abs(out.eta[i]));
  }
  for (std::size_t i = 0; i < s.u.size(); ++i) {
    out.u[i] = s.u[i] + w * (k1.u[i] + 2.0 * k2.u[i] + 2.0 * k3.u[i] + k4.u[i]);
    finite = finite && std::isfinite(out.u[i]);
  }
  last_source_ = w * (k1.source + 2.0 * k2.source + 2.0 * k3.source + k4.source);
  if (!finite) throw BlowUpError("non-finite state at t = " + std::to_string(out.time), out.time);
  if (reference_ > 0.0 && amax > options_.blowup_factor * reference_) {
    throw BlowUpError("max |eta| = " + std::to_string(amax) + " exceeds " + std::to_string(options_.blowup_factor) +
                          " x reference amplitude at t = " + std::to_string(out.time),
                      out.time);
  }
  return out;
}

FieldState rk4_step(Integrator& integrator, const FieldState& state) { return integrator.step(state); }

double courant_number(double amplitude, double depth, double gravity, double dt, double h_min) {
  if (!(h_min > 0.0)) throw InvalidArgument("h_min must be positive");
  if (!(depth + amplitude > 0.0)) throw InvalidArgument("depth + amplitude must be positive");
  return std::sqrt(gravity * (depth + amplitude)) * dt / h_min;
}

}  // namespace bouss
