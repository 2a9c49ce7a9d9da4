#pragma once

#include <string>
#include <vector>

#include "bouss/error.hpp"
#include "bouss/fem.hpp"
#include "bouss/models.hpp"

namespace bouss {

// Raised when c_s - w <= 0 somewhere, where the Peregrine nonlinearity and
// the eta recovery are singular.
class SingularNonlinearityError : public Error {
 public:
  using Error::Error;
};

// Line solitary wave travelling in direction alpha over flat depth D0.
// Crest on the line alpha . x = offset.
struct SolitaryWaveProblem {
  double amplitude = 0.3;
  double depth = 1.0;
  double gravity = 9.81;
  // 0 selects the system default (see resolved speeds below).
  double speed = 0.0;
  Vec2 direction{1.0, 0.0};
  double offset = 0.0;
  double gamma = 2.0;
  double tolerance = 1e-5;
  int max_iterations = 200;

  // sqrt(3 A / (4 D0^3)).
  double lambda() const;
  void validate() const;
};

struct PetviashviliState {
  // Empty for the Peregrine system.
  std::vector<double> eta;
  // Scalar coefficients on the velocity space nodes.
  std::vector<double> w;
  std::vector<double> w_tilde;
  double speed = 0.0;
  double multiplier = 1.0;
  double residual = 0.0;
  int iterations = 0;
  std::vector<double> residual_history;
  std::vector<std::string> warnings;
};

// Exact Peregrine speed-amplitude relation. A <= 0 throws InvalidArgument.
double speed_from_amplitude_peregrine(double amplitude, double depth, double gravity);
// Problem speed, or the exact Peregrine relation.
double resolved_speed_peregrine(const SolitaryWaveProblem& problem);
// Problem speed, or sqrt(g (D0 + A)).
double resolved_speed_bbm(const SolitaryWaveProblem& problem);

// eta0 = A sech^2(lambda xi), w0 = c eta0 / (D0 + eta0), L2-projected; w~ = 0.
// Adds a warning when eta0 exceeds 1e-10 A at the extreme xi of the mesh.
PetviashviliState initial_guess(const SolitaryWaveProblem& problem, const FunctionSpace& eta_space,
                                const FunctionSpace& u_space);

// Fixed point of c w - (1/3) D0^2 c w'' = w^2/2 + g D0 w / (c - w) in the
// scalar version of u_space. Throws ConvergenceError past max_iterations.
PetviashviliState petviashvili_peregrine(const SolitaryWaveProblem& problem, const FunctionSpace& u_space);
PetviashviliState petviashvili_peregrine(const SolitaryWaveProblem& problem, const FunctionSpace& u_space,
                                         PetviashviliState start);

// Coupled (eta, w) iteration for the travelling-wave form of the bbm model.
PetviashviliState petviashvili_bbm(const SolitaryWaveProblem& problem, const ModelSpec& model,
                                   const FunctionSpace& eta_space, const FunctionSpace& u_space);
PetviashviliState petviashvili_bbm(const SolitaryWaveProblem& problem, const ModelSpec& model,
                                   const FunctionSpace& eta_space, const FunctionSpace& u_space,
                                   PetviashviliState start);

// Marches the bbm speed from sqrt(g D0)(1 + 0.02) to problem.speed in steps
// of step_fraction * sqrt(g D0), warm-starting every solve.
PetviashviliState petviashvili_bbm_continuation(const SolitaryWaveProblem& problem, const ModelSpec& model,
                                                const FunctionSpace& eta_space, const FunctionSpace& u_space,
                                                double step_fraction = 0.01);

// R_n of a given iterate, computed the same way as inside the iterations.
double petviashvili_residual_peregrine(const SolitaryWaveProblem& problem, const FunctionSpace& u_space,
                                       const PetviashviliState& state);
double petviashvili_residual_bbm(const SolitaryWaveProblem& problem, const ModelSpec& model,
                                 const FunctionSpace& eta_space, const FunctionSpace& u_space,
                                 const PetviashviliState& state);

// (eta, u) with u = w alpha + w~ alpha_perp. Without a state eta the Peregrine
// relation eta = D0 w / (c - w) is L2-projected onto eta_space.
FieldState recover_fields(const SolitaryWaveProblem& problem, const PetviashviliState& state,
                          const FunctionSpace& eta_space, const FunctionSpace& u_space);

}  // namespace bouss
