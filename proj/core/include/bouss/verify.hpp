#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "bouss/fem.hpp"
#include "bouss/models.hpp"

namespace bouss {

// log(E1 / E2) / log(h1 / h2) per adjacent pair. Throws InvalidArgument on
// mismatched lengths, non-positive entries or h not strictly decreasing.
std::vector<double> eoc(std::span<const double> errors, std::span<const double> hs);

struct VariableConvergence {
  std::string name;
  bool vector = false;
  std::vector<double> h;
  std::vector<ErrorNorms> errors;

  std::vector<double> l2() const;
  std::vector<double> h1() const;
  std::vector<double> hdiv() const;
  std::vector<double> eoc_l2() const { return eoc(l2(), h); }
  std::vector<double> eoc_h1() const { return eoc(h1(), h); }
  std::vector<double> eoc_hdiv() const { return eoc(hdiv(), h); }
};

struct ConvergenceRecord {
  std::vector<VariableConvergence> variables;

  const VariableConvergence& variable(const std::string& name) const;
};

// Columns: variable,h,E_L2,EOC_L2,E_H1,EOC_H1,E_Hdiv,EOC_Hdiv. EOC cells of
// the first row and H(div) cells of scalar variables are empty.
void write_convergence_csv(std::ostream& out, const ConvergenceRecord& record);
void write_convergence_text(std::ostream& out, const ConvergenceRecord& record);

using VectorJet = std::array<Jet, 2>;

// Strong form of the momentum operator E(u) for one model at one point.
Vec2 apply_momentum_operator(const ModelSpec& model, const Jet& depth, const VectorJet& u);

// Unit square meshes used by the studies: n x n crossed squares, h = 1/n.
Triangulation unit_square_mesh(int n);

// u = (cos(pi y / 2) sin(pi x), cos(pi x / 2) sin(pi y)), which has u . n = 0 on the unit square.
VectorJet elliptic_exact(Vec2 p);

// Solves C(u_h, phi) = (E(u), phi) on each unit square mesh and records the
// L2, H1 and H(div) errors of u. The operator is the classical one unless given.
ConvergenceRecord run_elliptic_study(const Bathymetry& bathymetry, int degree, double nitsche_constant,
                                     std::span<const int> divisions, const ModelSpec& model = make_model(ModelKind::classical));

// max_i |C(u, phi_i) - (E(u), phi_i)| for the exact field u, with every
// integral done at the given quadrature degree.
double nitsche_consistency_residual(const FunctionSpace& uspace, const Bathymetry& bathymetry, const ModelSpec& model,
                                    double nitsche_constant, const std::function<VectorJet(Vec2)>& exact,
                                    int quadrature_degree);

// Exact fields of a manufactured solution with their time derivatives.
struct MmsCase {
  std::string name;
  ModelSpec model;
  Bathymetry bathymetry = Bathymetry::flat(1.0);
  std::function<Jet(Vec2, double)> eta, eta_t;
  std::function<VectorJet(Vec2, double)> u, u_t;
  double final_time = 1.0;
  double dt = 5e-4;
};

// Manufactured fields on the unit square over D = -(x + y)/20 + 3/2, g = 9.81:
// eta = e^t cos(pi x) sin(pi y); u = e^{(x+y)t}(cos(pi y/2) sin(pi x), cos(pi x/2) sin(pi y)),
// or e^t (x cos(pi x/2) sin(pi y), y cos(pi y/2) sin(pi x)) for the simplified model.
MmsCase standard_mms_case(const ModelSpec& model);

struct MmsErrors {
  ErrorNorms eta;
  ErrorNorms u;
  int steps = 0;
};

// Integrates the forced system from the projected exact data to final_time.
MmsErrors run_mms(const MmsCase& mms, const Triangulation& mesh, const Discretization& disc);

// Variables "eta" and "u" over the unit square meshes.
ConvergenceRecord run_mms_study(const MmsCase& mms, int r1, int r2, std::span<const int> divisions,
                                double nitsche_constant = 50.0);

// |int eta_h(t) - int eta_h(0)| per sample.
std::vector<double> track_mass(const FunctionSpace& eta_space, std::span<const std::vector<double>> history);

}  // namespace bouss
