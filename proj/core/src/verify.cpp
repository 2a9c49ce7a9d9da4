#include "bouss/verify.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "bouss/error.hpp"
#include "bouss/rhs.hpp"
#include "bouss/timestep.hpp"

namespace bouss {

std::vector<double> eoc(std::span<const double> errors, std::span<const double> hs) {
  if (errors.size() != hs.size()) throw InvalidArgument("eoc: errors and mesh sizes differ in length");
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!(errors[i] > 0.0)) throw InvalidArgument("eoc: rate undefined for non-positive error");
    if (!(hs[i] > 0.0)) throw InvalidArgument("eoc: mesh sizes must be positive");
    if (i > 0 && !(hs[i] < hs[i - 1])) throw InvalidArgument("eoc: mesh sizes must be strictly decreasing");
  }
  std::vector<double> r;
  for (std::size_t i = 1; i < errors.size(); ++i) {
    r.push_back(std::log(errors[i - 1] / errors[i]) / std::log(hs[i - 1] / hs[i]));
  }
  return r;
}

std::vector<double> VariableConvergence::l2() const {
  std::vector<double> v;
  for (const auto& e : errors) v.push_back(e.l2);
  return v;
}
std::vector<double> VariableConvergence::h1() const {
  std::vector<double> v;
  for (const auto& e : errors) v.push_back(e.h1);
  return v;
}
std::vector<double> VariableConvergence::hdiv() const {
  if (!vector) throw InvalidArgument("H(div) error is defined for vector variables only");
  std::vector<double> v;
  for (const auto& e : errors) v.push_back(e.hdiv);
  return v;
}

const VariableConvergence& ConvergenceRecord::variable(const std::string& name) const {
  for (const auto& v : variables)
    if (v.name == name) return v;
  throw InvalidArgument("no variable '" + name + "' in convergence record");
}

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Columns {
  std::vector<double> e[3];
  std::vector<double> r[3];
};

Columns columns(const VariableConvergence& v) {
  Columns c;
  c.e[0] = v.l2();
  c.e[1] = v.h1();
  if (v.vector) c.e[2] = v.hdiv();
  for (int k = 0; k < 3; ++k) {
    if (c.e[k].empty()) continue;
    bool positive = true;
    for (double x : c.e[k]) positive = positive && x > 0.0;
    if (positive) c.r[k] = eoc(c.e[k], v.h);
  }
  return c;
}

}  // namespace

void write_convergence_csv(std::ostream& out, const ConvergenceRecord& record) {
  out << "variable,h,E_L2,EOC_L2,E_H1,EOC_H1,E_Hdiv,EOC_Hdiv\n";
  for (const auto& v : record.variables) {
    const Columns c = columns(v);
    for (std::size_t i = 0; i < v.h.size(); ++i) {
      out << v.name << ',' << fmt("%.17g", v.h[i]);
      for (int k = 0; k < 3; ++k) {
        out << ',';
        if (!c.e[k].empty()) out << fmt("%.17g", c.e[k][i]);
        out << ',';
        if (i > 0 && !c.r[k].empty()) out << fmt("%.17g", c.r[k][i - 1]);
      }
      out << '\n';
    }
  }
}

void write_convergence_text(std::ostream& out, const ConvergenceRecord& record) {
  for (const auto& v : record.variables) {
    const Columns c = columns(v);
    out << v.name << '\n';
    out << "         h" << "        E_L2  EOC_L2        E_H1  EOC_H1";
    if (v.vector) out << "      E_Hdiv EOC_Hdiv";
    out << '\n';
    for (std::size_t i = 0; i < v.h.size(); ++i) {
      out << fmt("%10.6f", v.h[i]);
      for (int k = 0; k < (v.vector ? 3 : 2); ++k) {
        out << fmt("  %10.4e", c.e[k][i]);
        out << (i > 0 && !c.r[k].empty() ? fmt("  %6.3f", c.r[k][i - 1]) : std::string(8, ' '));
      }
      out << '\n';
    }
    out << '\n';
  }
}

Vec2 apply_momentum_operator(const ModelSpec& model, const Jet& D, const VectorJet& u) {
  const Jet& ux = u[0];
  const Jet& uy = u[1];
  if (model.kind == ModelKind::simplified) {
    const double s = D.v * D.v / 3.0;
    return {ux.v - s * ux.laplacian(), uy.v - s * uy.laplacian()};
  }
  const Jet Dux = D * ux;
  const Jet Duy = D * uy;
  const Vec2 grad_div_Du{Dux.dxx + Duy.dxy, Dux.dxy + Duy.dyy};
  const Vec2 grad_div_u{ux.dxx + uy.dxy, ux.dxy + uy.dyy};
  return Vec2{ux.v, uy.v} + (model.beta1() * D.v) * grad_div_Du + (model.beta2() * D.v * D.v) * grad_div_u;
}

Triangulation unit_square_mesh(int n) {
  if (n < 1) throw InvalidArgument("mesh divisions must be positive");
  return build_rectangle_mesh({0.0, 1.0, 0.0, 1.0}, n, n, DiagonalPattern::crossed);
}

VectorJet elliptic_exact(Vec2 p) {
  using std::numbers::pi;
  const Jet x = Jet::x(p.x), y = Jet::y(p.y);
  return {cos(0.5 * pi * y) * sin(pi * x), cos(0.5 * pi * x) * sin(pi * y)};
}

ConvergenceRecord run_elliptic_study(const Bathymetry& bathymetry, int degree, double nitsche_constant,
                                     std::span<const int> divisions, const ModelSpec& model) {
  VariableConvergence var{"u", true, {}, {}};
  for (int n : divisions) {
    const Triangulation mesh = unit_square_mesh(n);
    const FunctionSpace space(mesh, degree, 2);
    const SparseMatrix A = assemble_momentum_operator(space, bathymetry, model, nitsche_constant);
    const auto b = assemble_load(space, VectorFunction([&](Vec2 p) {
                                   return apply_momentum_operator(model, bathymetry.jet(p), elliptic_exact(p));
                                 }));
    const auto u = DirectSolver(A).solve(b);
    var.h.push_back(1.0 / n);
    var.errors.push_back(error_norms(space, u, VectorJetFunction(elliptic_exact)));
  }
  return {{var}};
}

double nitsche_consistency_residual(const FunctionSpace& uspace, const Bathymetry& bathymetry, const ModelSpec& model,
                                    double nitsche_constant, const std::function<VectorJet(Vec2)>& exact,
                                    int quadrature_degree) {
  if (model.kind == ModelKind::simplified) throw InvalidArgument("the simplified model has no Nitsche terms");
  if (uspace.components() != 2) throw InvalidArgument("consistency residual needs a vector space");
  const double b1 = model.beta1(), b2 = model.beta2(), bs = b1 + b2;
  const ReferenceTable tab(uspace.basis(), triangle_rule(quadrature_degree));
  const auto& mesh = uspace.mesh();
  const int nb = tab.nb;
  const std::size_t n = uspace.num_nodes();
  std::vector<double> r(uspace.size(), 0.0);

  // Test function (component c, basis i): value, div, div(D phi), div(D^2 phi).
  struct Test {
    Vec2 val;
    double div, divD, divD2;
  };
  auto test = [](int c, double phi, Vec2 g, const Jet& D) {
    const double dphi = c == 0 ? g.x : g.y;
    const double dD = c == 0 ? D.dx : D.dy;
    return Test{c == 0 ? Vec2{phi, 0.0} : Vec2{0.0, phi}, dphi, D.v * dphi + phi * dD,
                D.v * D.v * dphi + 2.0 * D.v * dD * phi};
  };

  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const AffineMap map(mesh, t);
    const auto nodes = uspace.cell_nodes(t);
    for (int q = 0; q < tab.nq; ++q) {
      const auto& qp = tab.points[q];
      const Vec2 x = map.map(qp.xi, qp.eta);
      const double w = qp.weight * std::abs(map.det);
      const Jet D = bathymetry.jet(x);
      const VectorJet u = exact(x);
      const Vec2 uv{u[0].v, u[1].v};
      const double div_u = u[0].dx + u[1].dy;
      const double div_Du = (D * u[0]).dx + (D * u[1]).dy;
      const Vec2 E = apply_momentum_operator(model, D, u);
      for (int c = 0; c < 2; ++c) {
        for (int i = 0; i < nb; ++i) {
          const Vec2 g = map.gradient(tab.dxi[q * nb + i], tab.deta[q * nb + i]);
          const Test f = test(c, tab.phi[q * nb + i], g, D);
          r[c * n + nodes[i]] += w * (dot(uv - E, f.val) - b1 * div_Du * f.divD - b2 * div_u * f.divD2);
        }
      }
    }
  }

  const auto& seg = segment_rule(quadrature_degree);
  std::vector<double> phi(nb), dxi(nb), deta(nb);
  for (const auto& fct : mesh.boundary_facets()) {
    const std::size_t t = fct.triangle;
    const auto& tri = mesh.triangles()[t];
    int k = 0;
    while (!(tri[k] == fct.v[0] && tri[(k + 1) % 3] == fct.v[1])) ++k;
    const AffineMap map(mesh, t);
    const auto nodes = uspace.cell_nodes(t);
    const double penalty = nitsche_constant / fct.length;
    for (std::size_t q = 0; q < seg.nodes.size(); ++q) {
      const auto ref = edge_point(k, seg.nodes[q]);
      const double w = seg.weights[q] * fct.length;
      uspace.basis().values(ref[0], ref[1], phi);
      uspace.basis().gradients(ref[0], ref[1], dxi, deta);
      const Vec2 x = map.map(ref[0], ref[1]);
      const Jet D = bathymetry.jet(x);
      const VectorJet u = exact(x);
      const Vec2 uv{u[0].v, u[1].v};
      const Vec2 gD{D.dx, D.dy};
      const double div_Du = (D * u[0]).dx + (D * u[1]).dy;
      const double Dun = D.v * dot(uv, fct.normal);
      for (int c = 0; c < 2; ++c) {
        for (int i = 0; i < nb; ++i) {
          const Test f = test(c, phi[i], map.gradient(dxi[i], deta[i]), D);
          const double Dvn = D.v * dot(f.val, fct.normal);
          const double v = bs * (div_Du * Dvn + f.divD * Dun) - b2 * (dot(uv, gD) * Dvn + dot(f.val, gD) * Dun) -
                           bs * penalty * Dun * Dvn;
          r[c * n + nodes[i]] += w * v;
        }
      }
    }
  }
  double m = 0.0;
  for (double v : r) m = std::max(m, std::abs(v));
  return m;
}

MmsCase standard_mms_case(const ModelSpec& model) {
  using std::numbers::pi;
  MmsCase c;
  c.name = to_string(model.kind);
  c.model = model;
  c.bathymetry = Bathymetry::linear(1.5, -0.05, -0.05);
  c.eta = [](Vec2 p, double t) {
    return std::exp(t) * (cos(pi * Jet::x(p.x)) * sin(pi * Jet::y(p.y)));
  };
  c.eta_t = c.eta;
  if (model.kind == ModelKind::simplified) {
    c.u = [](Vec2 p, double t) {
      const Jet x = Jet::x(p.x), y = Jet::y(p.y);
      const double e = std::exp(t);
      return VectorJet{e * (x * cos(0.5 * pi * x) * sin(pi * y)), e * (y * cos(0.5 * pi * y) * sin(pi * x))};
    };
    c.u_t = c.u;
  } else {
    c.u = [](Vec2 p, double t) {
      const Jet x = Jet::x(p.x), y = Jet::y(p.y);
      const Jet e = exp(t * (x + y));
      return VectorJet{e * cos(0.5 * pi * y) * sin(pi * x), e * cos(0.5 * pi * x) * sin(pi * y)};
    };
    c.u_t = [u = c.u](Vec2 p, double t) {
      const Jet s = Jet::x(p.x) + Jet::y(p.y);
      const VectorJet v = u(p, t);
      return VectorJet{s * v[0], s * v[1]};
    };
  }
  return c;
}

namespace {

// Load vectors (S_eta, psi) [+ BBM boundary flux] and (S_u, phi) of a
// manufactured solution, with geometry cached per quadrature point.
class MmsForcing {
 public:
  MmsForcing(const MmsCase& mms, const Semidiscretization& sys)
      : mms_(&mms),
        sys_(&sys),
        rule_(triangle_rule(sys.discretization().effective_quadrature_degree())),
        te_(sys.eta_space().basis(), rule_),
        tu_(sys.u_space().basis(), rule_) {
    const auto& mesh = sys.mesh();
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
      const AffineMap map(mesh, t);
      for (const auto& qp : rule_) {
        x_.push_back(map.map(qp.xi, qp.eta));
        w_.push_back(qp.weight * std::abs(map.det));
      }
    }
    const double ab = mms.model.kind == ModelKind::bbm ? mms.model.a + mms.model.b : 0.0;
    if (ab != 0.0) {
      const auto& seg = segment_rule(sys.discretization().effective_quadrature_degree());
      const auto& basis = sys.eta_space().basis();
      std::vector<double> phi(basis.size());
      for (const auto& f : mesh.boundary_facets()) {
        const auto& tri = mesh.triangles()[f.triangle];
        int k = 0;
        while (!(tri[k] == f.v[0] && tri[(k + 1) % 3] == f.v[1])) ++k;
        const AffineMap map(mesh, f.triangle);
        for (std::size_t q = 0; q < seg.nodes.size(); ++q) {
          const auto ref = edge_point(k, seg.nodes[q]);
          basis.values(ref[0], ref[1], phi);
          facets_.push_back({map.map(ref[0], ref[1]), f.normal, seg.weights[q] * f.length, static_cast<std::size_t>(f.triangle), phi});
        }
      }
    }
  }

  void operator()(double t, std::vector<double>& fs, std::vector<double>& fu) {
    if (t != cached_t_ || cached_s_.empty()) evaluate(t);
    for (std::size_t i = 0; i < fs.size(); ++i) fs[i] += cached_s_[i];
    for (std::size_t i = 0; i < fu.size(); ++i) fu[i] += cached_u_[i];
  }

 private:
  struct FacetPoint {
    Vec2 x, normal;
    double w;
    std::size_t cell;
    std::vector<double> phi;
  };

  void evaluate(double t) {
    const auto& m = mms_->model;
    const auto& es = sys_->eta_space();
    const auto& us = sys_->u_space();
    const std::size_t nu = us.num_nodes();
    const double g = m.gravity;
    const bool bbm = m.kind == ModelKind::bbm;
    const double ab = bbm ? m.a + m.b : 0.0;
    const bool advective = m.nonlinearity == Nonlinearity::advective;
    cached_s_.assign(es.size(), 0.0);
    cached_u_.assign(us.size(), 0.0);
    const std::size_t nq = rule_.size();
    for (std::size_t k = 0; k < x_.size(); ++k) {
      const std::size_t cell = k / nq;
      const std::size_t q = k % nq;
      const Vec2 x = x_[k];
      const Jet D = mms_->bathymetry.jet(x);
      const Jet eta = mms_->eta(x, t);
      const Jet eta_t = mms_->eta_t(x, t);
      const VectorJet u = mms_->u(x, t);
      const VectorJet u_t = mms_->u_t(x, t);
      const Jet H = D + eta;
      double s_eta = eta_t.v + (H * u[0]).dx + (H * u[1]).dy;
      if (bbm) {
        const Jet D2 = D * D;
        s_eta -= ab * (D2.v * eta_t.laplacian() + D2.dx * eta_t.dx + D2.dy * eta_t.dy);
      }
      const Vec2 N = advective ? Vec2{u[0].v * u[0].dx + u[1].v * u[0].dy, u[0].v * u[1].dx + u[1].v * u[1].dy}
                               : Vec2{u[0].v * u[0].dx + u[1].v * u[1].dx, u[0].v * u[0].dy + u[1].v * u[1].dy};
      const Vec2 s_u = apply_momentum_operator(m, D, u_t) + g * Vec2{eta.dx, eta.dy} + N;
      const double w = w_[k];
      const auto en = es.cell_nodes(cell);
      for (int i = 0; i < te_.nb; ++i) cached_s_[en[i]] += w * s_eta * te_.phi[q * te_.nb + i];
      const auto un = us.cell_nodes(cell);
      for (int i = 0; i < tu_.nb; ++i) {
        const double p = w * tu_.phi[q * tu_.nb + i];
        cached_u_[un[i]] += p * s_u.x;
        cached_u_[nu + un[i]] += p * s_u.y;
      }
    }
    for (const auto& f : facets_) {
      const Jet D = mms_->bathymetry.jet(f.x);
      const Jet eta_t = mms_->eta_t(f.x, t);
      const double flux = ab * D.v * D.v * (eta_t.dx * f.normal.x + eta_t.dy * f.normal.y);
      const auto en = es.cell_nodes(f.cell);
      for (std::size_t i = 0; i < f.phi.size(); ++i) cached_s_[en[i]] += f.w * flux * f.phi[i];
    }
    cached_t_ = t;
  }

  const MmsCase* mms_;
  const Semidiscretization* sys_;
  std::vector<QuadPoint> rule_;
  ReferenceTable te_, tu_;
  std::vector<Vec2> x_;
  std::vector<double> w_;
  std::vector<FacetPoint> facets_;
  double cached_t_ = 0.0;
  std::vector<double> cached_s_, cached_u_;
};

}  // namespace

MmsErrors run_mms(const MmsCase& mms, const Triangulation& mesh, const Discretization& disc) {
  if (!mms.eta || !mms.eta_t || !mms.u || !mms.u_t) throw InvalidArgument("manufactured case is missing a field");
  if (!(mms.final_time > 0.0) || !(mms.dt > 0.0)) throw InvalidArgument("final time and dt must be positive");
  const Semidiscretization sys(mesh, mms.model, mms.bathymetry, disc);
  const int q = disc.effective_quadrature_degree();
  FieldState s;
  s.time = 0.0;
  s.eta = l2_project(sys.eta_space(), ScalarFunction([&](Vec2 p) { return mms.eta(p, 0.0).v; }), q);
  s.u = l2_project(sys.u_space(), VectorFunction([&](Vec2 p) {
                     const VectorJet u = mms.u(p, 0.0);
                     return Vec2{u[0].v, u[1].v};
                   }),
                   q);
  sys.apply_velocity_constraints(s.u);
  IntegratorOptions opts;
  opts.dt = mms.dt;
  Integrator integ(sys, opts);
  MmsForcing forcing(mms, sys);
  integ.set_forcing([&forcing](double t, std::vector<double>& fs, std::vector<double>& fu) { forcing(t, fs, fu); });
  const int steps = static_cast<int>(std::lround(mms.final_time / mms.dt));
  for (int i = 0; i < steps; ++i) s = integ.step(s);
  const double T = s.time;
  MmsErrors e;
  e.steps = steps;
  e.eta = error_norms(sys.eta_space(), s.eta, ScalarJetFunction([&](Vec2 p) { return mms.eta(p, T); }), q);
  e.u = error_norms(sys.u_space(), s.u, VectorJetFunction([&](Vec2 p) { return mms.u(p, T); }), q);
  return e;
}

ConvergenceRecord run_mms_study(const MmsCase& mms, int r1, int r2, std::span<const int> divisions,
                                double nitsche_constant) {
  Discretization disc;
  disc.r1 = r1;
  disc.r2 = r2;
  disc.nitsche_constant = nitsche_constant;
  disc.validate();
  VariableConvergence eta{"eta", false, {}, {}};
  VariableConvergence u{"u", true, {}, {}};
  for (int n : divisions) {
    const Triangulation mesh = unit_square_mesh(n);
    const MmsErrors e = run_mms(mms, mesh, disc);
    eta.h.push_back(1.0 / n);
    u.h.push_back(1.0 / n);
    eta.errors.push_back(e.eta);
    u.errors.push_back(e.u);
  }
  return {{eta, u}};
}

std::vector<double> track_mass(const FunctionSpace& eta_space, std::span<const std::vector<double>> history) {
  std::vector<double> drift;
  if (history.empty()) return drift;
  const double m0 = integrate(eta_space, history.front());
  for (const auto& eta : history) drift.push_back(std::abs(integrate(eta_space, eta) - m0));
  return drift;
}

}  // namespace bouss
