#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "bouss/error.hpp"
#include "bouss/rhs.hpp"
#include "bouss/sparse.hpp"

namespace bouss {

class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, SolverReport report = {}) : Error(what), report_(report) {}
  const SolverReport& report() const noexcept { return report_; }

 private:
  SolverReport report_;
};

// Non-finite state or runaway amplitude, typically a Courant violation.
class BlowUpError : public IntegrationError {
 public:
  BlowUpError(const std::string& what, double time) : IntegrationError(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

enum class LinearSolverKind {
  // Sparse LU factorizations computed once per integrator.
  direct,
  // CG / BiCGStab with Jacobi preconditioning, warm-started per stage.
  iterative,
};

struct IntegratorOptions {
  double dt = 0.1;
  LinearSolverKind solver = LinearSolverKind::direct;
  SolverOptions iterative;
  // Abort when max |eta| exceeds blowup_factor * reference_amplitude.
  double blowup_factor = 1e3;
  // 0 takes max |eta| of the first state stepped (amplitude check off if that is 0 too).
  double reference_amplitude = 0.0;
};

// Extra right-hand-side terms at time t, added in place (used by manufactured solutions).
using Forcing = std::function<void(double t, std::vector<double>& mass_rhs, std::vector<double>& momentum_rhs)>;

// Classical four-stage Runge-Kutta on the semidiscrete system.
class Integrator {
 public:
  Integrator(const Semidiscretization& system, IntegratorOptions options);
  ~Integrator();
  Integrator(Integrator&&) noexcept;

  void set_forcing(Forcing forcing) { forcing_ = std::move(forcing); }

  FieldState step(const FieldState& state);

  double dt() const { return options_.dt; }
  const Semidiscretization& system() const { return *system_; }
  // Worst stage report of the last step (iterative mode) or the residual check (direct mode).
  const SolverReport& last_report() const { return last_report_; }
  // dt-weighted integral of the mass-equation sources over the last step.
  double last_step_mass_source() const { return last_source_; }

 private:
  struct Derivative {
    std::vector<double> eta;
    std::vector<double> u;
    double source = 0.0;
  };
  Derivative evaluate(const FieldState& s);
  std::vector<double> solve(int which, const std::vector<double>& rhs, std::vector<double>& guess);

  const Semidiscretization* system_;
  IntegratorOptions options_;
  Forcing forcing_;
  std::unique_ptr<DirectSolver> mass_lu_;
  std::unique_ptr<DirectSolver> momentum_lu_;
  bool momentum_symmetric_ = false;
  std::vector<double> guess_eta_, guess_u_;
  SolverReport last_report_;
  double last_source_ = 0.0;
  double reference_ = -1.0;
};

FieldState rk4_step(Integrator& integrator, const FieldState& state);

// sqrt(g (D + A)) dt / h_min.
double courant_number(double amplitude, double depth, double gravity, double dt, double h_min);

}  // namespace bouss
