#include "bouss/solitary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>

namespace bouss {

namespace {

int quad_degree(const FunctionSpace& a, const FunctionSpace& b) { return 2 * std::max(a.degree(), b.degree()) + 2; }

void append_scaled(const SparseMatrix& A, double scale, int row_off, int col_off, std::vector<Triplet>& out) {
  const auto& off = A.row_offsets();
  const auto& cols = A.column_indices();
  const auto& vals = A.values();
  for (std::size_t i = 0; i < A.rows(); ++i) {
    for (std::size_t k = off[i]; k < off[i + 1]; ++k) {
      out.push_back({row_off + static_cast<int>(i), col_off + cols[k], scale * vals[k]});
    }
  }
}

// (f(eta_h, w_h), psi_i) for psi_i in target. eta_space may be null (eta = 0).
template <class F>
std::vector<double> composite_load(const FunctionSpace& target, const FunctionSpace* eta_space,
                                   std::span<const double> eta, const FunctionSpace& w_space,
                                   std::span<const double> w, int qdeg, F f) {
  const auto& rule = triangle_rule(qdeg);
  const ReferenceTable tt(target.basis(), rule);
  const ReferenceTable tw(w_space.basis(), rule);
  std::optional<ReferenceTable> te;
  if (eta_space) te.emplace(eta_space->basis(), rule);
  const auto& mesh = target.mesh();
  std::vector<double> b(target.size(), 0.0);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const double jac = std::abs(AffineMap(mesh, t).det);
    const auto tn = target.cell_nodes(t);
    const auto wn = w_space.cell_nodes(t);
    for (int q = 0; q < tt.nq; ++q) {
      double wv = 0.0;
      for (int i = 0; i < tw.nb; ++i) wv += w[wn[i]] * tw.phi[q * tw.nb + i];
      double ev = 0.0;
      if (te) {
        const auto en = eta_space->cell_nodes(t);
        for (int i = 0; i < te->nb; ++i) ev += eta[en[i]] * te->phi[q * te->nb + i];
      }
      const double val = f(ev, wv) * tt.points[q].weight * jac;
      for (int i = 0; i < tt.nb; ++i) b[tn[i]] += val * tt.phi[q * tt.nb + i];
    }
  }
  return b;
}

std::vector<double> solve_mass(const SparseMatrix& M, const std::vector<double>& b) {
  SolverOptions opts;
  opts.tol = 1e-13;
  auto res = cg_solve(M, b, opts);
  if (res.report.final_residual > 1e-10) throw ConvergenceError("mass-matrix solve did not converge");
  return res.x;
}

double sech2(double x) {
  const double c = std::cosh(x);
  return 1.0 / (c * c);
}

void check_subcritical(double c, std::span<const double> w) {
  for (double v : w) {
    if (!(c - v > 0.0)) {
      throw SingularNonlinearityError("c_s - w = " + std::to_string(c - v) + " <= 0: nonlinearity is singular");
    }
  }
}

// Peregrine pieces on the scalar velocity space.
struct PeregrineSystem {
  FunctionSpace space;
  int qdeg;
  double c, D0, g;
  SparseMatrix M, L;

  PeregrineSystem(const SolitaryWaveProblem& p, const FunctionSpace& u_space)
      : space(u_space.mesh(), u_space.degree(), 1),
        qdeg(2 * u_space.degree() + 2),
        c(resolved_speed_peregrine(p)),
        D0(p.depth),
        g(p.gravity) {
    M = assemble_mass(space, {}, qdeg);
    const SparseMatrix K = assemble_directional_stiffness(space, p.direction, qdeg);
    std::vector<Triplet> tr;
    append_scaled(M, c, 0, 0, tr);
    append_scaled(K, D0 * D0 * c / 3.0, 0, 0, tr);
    L = SparseMatrix::from_triplets(space.size(), tr);
  }

  std::vector<double> nonlinearity(std::span<const double> w) const {
    check_subcritical(c, w);
    const double cc = c, gd = g * D0;
    return composite_load(space, nullptr, {}, space, w, qdeg, [cc, gd](double, double v) {
      if (!(cc - v > 0.0)) {
        throw SingularNonlinearityError("c_s - w <= 0 at a quadrature point: nonlinearity is singular");
      }
      return 0.5 * v * v + gd * v / (cc - v);
    });
  }
};

// Coupled bbm pieces; second block row scaled by D0 / g so the operator is symmetric.
struct BbmSystem {
  std::size_t n1, n2;
  int qdeg;
  const FunctionSpace& eta_space;
  FunctionSpace w_space;
  double c, D0, g;
  SparseMatrix M1, M2, L;

  BbmSystem(const SolitaryWaveProblem& p, const ModelSpec& model, const FunctionSpace& es, const FunctionSpace& us)
      : n1(es.size()),
        n2(us.num_nodes()),
        qdeg(quad_degree(es, us)),
        eta_space(es),
        w_space(us.mesh(), us.degree(), 1),
        c(resolved_speed_bbm(p)),
        D0(p.depth),
        g(p.gravity) {
    if (model.kind != ModelKind::bbm) throw InvalidArgument("petviashvili_bbm needs a bbm model");
    if (&es.mesh() != &us.mesh()) throw InvalidArgument("eta and velocity spaces must share one mesh");
    if (es.components() != 1) throw InvalidArgument("eta space must be scalar");
    M1 = assemble_mass(eta_space, {}, qdeg);
    M2 = assemble_mass(w_space, {}, qdeg);
    const SparseMatrix K1 = assemble_directional_stiffness(eta_space, p.direction, qdeg);
    const SparseMatrix K2 = assemble_directional_stiffness(w_space, p.direction, qdeg);
    const double D2 = D0 * D0;
    const double s = D0 / g;
    std::vector<Triplet> tr;
    append_scaled(M1, c, 0, 0, tr);
    append_scaled(K1, (model.a + model.b) * c * D2, 0, 0, tr);
    append_scaled(M2, s * c, n1, n1, tr);
    append_scaled(K2, -s * (model.c + model.d) * c * D2, n1, n1, tr);
    for (const Triplet& t : mixed_mass_triplets(eta_space, w_space, qdeg)) {
      tr.push_back({t.row, static_cast<int>(n1) + t.col, -D0 * t.value});
      tr.push_back({static_cast<int>(n1) + t.col, t.row, -D0 * t.value});
    }
    L = SparseMatrix::from_triplets(n1 + n2, tr);
  }

  std::vector<double> pack(const PetviashviliState& s) const {
    if (s.eta.size() != n1 || s.w.size() != n2) throw InvalidArgument("state does not match the spaces");
    std::vector<double> U(s.eta);
    U.insert(U.end(), s.w.begin(), s.w.end());
    return U;
  }

  std::vector<double> nonlinearity(std::span<const double> U) const {
    const auto eta = U.subspan(0, n1);
    const auto w = U.subspan(n1, n2);
    auto b = composite_load(eta_space, &eta_space, eta, w_space, w, qdeg, [](double e, double v) { return e * v; });
    const auto b2 = composite_load(w_space, nullptr, {}, w_space, w, qdeg, [](double, double v) { return 0.5 * v * v; });
    const double s = D0 / g;
    for (double v : b2) b.push_back(s * v);
    return b;
  }

  double norm(std::span<const double> U) const {
    const auto eta = U.subspan(0, n1);
    const auto w = U.subspan(n1, n2);
    return std::sqrt(dot(eta, M1 * eta) + dot(w, M2 * w));
  }
};

struct Evaluation {
  double lu, nu, residual;
};

template <class System>
Evaluation evaluate(const System& sys, std::span<const double> U, const std::vector<double>& N, double norm) {
  const auto LU = sys.L * U;
  const double lu = dot(LU, U);
  const double nu = dot(N, U);
  if (!(norm > 0.0)) throw ConvergenceError("Petviashvili iterate vanished");
  return {lu, nu, std::abs(lu - nu) / norm};
}

template <class System, class Norm, class Store>
PetviashviliState iterate(const SolitaryWaveProblem& p, const System& sys, std::vector<double> U,
                          PetviashviliState state, Norm norm_of, Store store) {
  const DirectSolver lu(sys.L);
  state.residual_history.clear();
  state.speed = sys.c;
  for (int n = 0;; ++n) {
    const auto N = sys.nonlinearity(U);
    const Evaluation e = evaluate(sys, U, N, norm_of(U));
    state.residual_history.push_back(e.residual);
    if (!std::isfinite(e.residual)) throw ConvergenceError("Petviashvili residual is not finite");
    if (e.residual < p.tolerance) {
      state.multiplier = e.lu / e.nu;
      state.residual = e.residual;
      state.iterations = n;
      store(U, state);
      return state;
    }
    if (n >= p.max_iterations) {
      throw ConvergenceError("Petviashvili iteration did not reach tolerance " + std::to_string(p.tolerance) +
                             " in " + std::to_string(p.max_iterations) + " iterations (residual " +
                             std::to_string(e.residual) + ")");
    }
    if (!(e.nu > 0.0)) throw ConvergenceError("Petviashvili multiplier undefined: (N(w), w) <= 0");
    const double m = std::pow(e.lu / e.nu, p.gamma);
    U = lu.solve(N);
    for (double& v : U) v *= m;
  }
}

}  // namespace

double SolitaryWaveProblem::lambda() const { return std::sqrt(3.0 * amplitude / (4.0 * depth * depth * depth)); }

void SolitaryWaveProblem::validate() const {
  if (!(amplitude > 0.0)) throw InvalidArgument("solitary amplitude must be positive");
  if (!(depth > 0.0)) throw InvalidArgument("solitary depth must be positive");
  if (!(gravity > 0.0)) throw InvalidArgument("gravity must be positive");
  if (std::abs(norm(direction) - 1.0) > 1e-12) throw InvalidArgument("direction must be a unit vector");
  if (!(gamma >= 1.0 && gamma <= 3.0)) throw InvalidArgument("gamma must lie in [1, 3]");
  if (!(tolerance > 0.0)) throw InvalidArgument("tolerance must be positive");
  if (max_iterations < 1) throw InvalidArgument("max_iterations must be at least 1");
  if (speed != 0.0 && !(speed > std::sqrt(gravity * depth))) {
    throw InvalidArgument("solitary speed must exceed sqrt(g D0)");
  }
}

double speed_from_amplitude_peregrine(double A, double D0, double g) {
  if (!(A > 0.0)) throw InvalidArgument("amplitude must be positive");
  if (!(D0 > 0.0) || !(g > 0.0)) throw InvalidArgument("depth and gravity must be positive");
  const double H = D0 + A;
  // H log(H / D0) - A, written to avoid cancellation for small A / D0.
  const double r = A / D0;
  double bracket;
  if (r < 1e-3) {
    double term = r * r / 2.0, sum = 0.0;
    for (int k = 2; k < 12; ++k) {
      sum += term;
      term *= -r * static_cast<double>(k - 1) / static_cast<double>(k + 1);
    }
    bracket = D0 * sum;
  } else {
    bracket = H * std::log1p(r) - A;
  }
  return std::sqrt(6.0) * H / std::sqrt(3.0 * D0 + 2.0 * A) * std::sqrt(g * D0 * bracket) / A;
}

double resolved_speed_peregrine(const SolitaryWaveProblem& p) {
  p.validate();
  return p.speed != 0.0 ? p.speed : speed_from_amplitude_peregrine(p.amplitude, p.depth, p.gravity);
}

double resolved_speed_bbm(const SolitaryWaveProblem& p) {
  p.validate();
  return p.speed != 0.0 ? p.speed : std::sqrt(p.gravity * (p.depth + p.amplitude));
}

PetviashviliState initial_guess(const SolitaryWaveProblem& p, const FunctionSpace& eta_space,
                                const FunctionSpace& u_space) {
  p.validate();
  const double A = p.amplitude, D0 = p.depth, lam = p.lambda();
  const double c = std::sqrt(p.gravity * (D0 + A));
  const Vec2 a = p.direction;
  const double x0 = p.offset;
  auto eta0 = [=](Vec2 x) { return A * sech2(lam * (dot(a, x) - x0)); };
  auto w0 = [=](Vec2 x) {
    const double e = A * sech2(lam * (dot(a, x) - x0));
    return c * e / (D0 + e);
  };
  PetviashviliState s;
  const FunctionSpace ws(u_space.mesh(), u_space.degree(), 1);
  const int q = quad_degree(eta_space, u_space);
  s.eta = l2_project(eta_space, eta0, q);
  s.w = l2_project(ws, w0, q);
  s.w_tilde.assign(ws.size(), 0.0);
  s.speed = c;

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const Vec2& v : u_space.mesh().vertices()) {
    lo = std::min(lo, dot(a, v) - x0);
    hi = std::max(hi, dot(a, v) - x0);
  }
  const double edge = std::max(A * sech2(lam * lo), A * sech2(lam * hi));
  if (edge > 1e-10 * A) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "initial guess is not negligible at the channel ends: eta0 = %.3e > 1e-10 A",
                  edge);
    s.warnings.push_back(buf);
  }
  return s;
}

PetviashviliState petviashvili_peregrine(const SolitaryWaveProblem& p, const FunctionSpace& u_space) {
  const FunctionSpace scalar_eta(u_space.mesh(), 1, 1);
  PetviashviliState start = initial_guess(p, scalar_eta, u_space);
  start.eta.clear();
  return petviashvili_peregrine(p, u_space, std::move(start));
}

PetviashviliState petviashvili_peregrine(const SolitaryWaveProblem& p, const FunctionSpace& u_space,
                                         PetviashviliState start) {
  const PeregrineSystem sys(p, u_space);
  if (start.w.size() != sys.space.size()) throw InvalidArgument("starting iterate does not match the velocity space");
  std::vector<double> U = start.w;
  start.eta.clear();
  auto norm_of = [&sys](std::span<const double> w) { return std::sqrt(dot(w, sys.M * w)); };
  auto store = [](const std::vector<double>& U, PetviashviliState& s) {
    s.w = U;
    s.w_tilde.assign(U.size(), 0.0);
  };
  return iterate(p, sys, std::move(U), std::move(start), norm_of, store);
}

PetviashviliState petviashvili_bbm(const SolitaryWaveProblem& p, const ModelSpec& model,
                                   const FunctionSpace& eta_space, const FunctionSpace& u_space) {
  return petviashvili_bbm(p, model, eta_space, u_space, initial_guess(p, eta_space, u_space));
}

PetviashviliState petviashvili_bbm(const SolitaryWaveProblem& p, const ModelSpec& model,
                                   const FunctionSpace& eta_space, const FunctionSpace& u_space,
                                   PetviashviliState start) {
  const BbmSystem sys(p, model, eta_space, u_space);
  std::vector<double> U = sys.pack(start);
  auto norm_of = [&sys](std::span<const double> V) { return sys.norm(V); };
  const std::size_t n1 = sys.n1;
  auto store = [n1](const std::vector<double>& V, PetviashviliState& s) {
    s.eta.assign(V.begin(), V.begin() + static_cast<std::ptrdiff_t>(n1));
    s.w.assign(V.begin() + static_cast<std::ptrdiff_t>(n1), V.end());
    s.w_tilde.assign(s.w.size(), 0.0);
  };
  return iterate(p, sys, std::move(U), std::move(start), norm_of, store);
}

PetviashviliState petviashvili_bbm_continuation(const SolitaryWaveProblem& p, const ModelSpec& model,
                                                const FunctionSpace& eta_space, const FunctionSpace& u_space,
                                                double step_fraction) {
  if (!(step_fraction > 0.0)) throw InvalidArgument("continuation step must be positive");
  const double target = resolved_speed_bbm(p);
  const double c0 = std::sqrt(p.gravity * p.depth);
  double c = std::min(1.02 * c0, target);
  SolitaryWaveProblem sub = p;
  sub.amplitude = c * c / p.gravity - p.depth;
  sub.speed = c;
  PetviashviliState s = petviashvili_bbm(sub, model, eta_space, u_space);
  int total = s.iterations;
  while (c < target) {
    c = std::min(c + step_fraction * c0, target);
    sub.speed = c;
    s = petviashvili_bbm(sub, model, eta_space, u_space, std::move(s));
    total += s.iterations;
  }
  s.iterations = total;
  return s;
}

double petviashvili_residual_peregrine(const SolitaryWaveProblem& p, const FunctionSpace& u_space,
                                       const PetviashviliState& s) {
  const PeregrineSystem sys(p, u_space);
  if (s.w.size() != sys.space.size()) throw InvalidArgument("iterate does not match the velocity space");
  const auto N = sys.nonlinearity(s.w);
  return evaluate(sys, s.w, N, std::sqrt(dot(s.w, sys.M * s.w))).residual;
}

double petviashvili_residual_bbm(const SolitaryWaveProblem& p, const ModelSpec& model,
                                 const FunctionSpace& eta_space, const FunctionSpace& u_space,
                                 const PetviashviliState& s) {
  const BbmSystem sys(p, model, eta_space, u_space);
  const auto U = sys.pack(s);
  const auto N = sys.nonlinearity(U);
  return evaluate(sys, U, N, sys.norm(U)).residual;
}

FieldState recover_fields(const SolitaryWaveProblem& p, const PetviashviliState& s, const FunctionSpace& eta_space,
                          const FunctionSpace& u_space) {
  p.validate();
  const std::size_t n = u_space.num_nodes();
  if (s.w.size() != n) throw InvalidArgument("iterate does not match the velocity space");
  if (!s.w_tilde.empty() && s.w_tilde.size() != n) throw InvalidArgument("w~ does not match the velocity space");
  FieldState f;
  if (!s.eta.empty()) {
    if (s.eta.size() != eta_space.size()) throw InvalidArgument("eta does not match the eta space");
    f.eta = s.eta;
  } else {
    const double c = s.speed > 0.0 ? s.speed : resolved_speed_peregrine(p);
    check_subcritical(c, s.w);
    const FunctionSpace ws(u_space.mesh(), u_space.degree(), 1);
    const double D0 = p.depth;
    const int q = quad_degree(eta_space, u_space);
    const auto b = composite_load(eta_space, nullptr, {}, ws, s.w, q, [c, D0](double, double v) {
      if (!(c - v > 0.0)) throw SingularNonlinearityError("c_s - w <= 0: eta recovery is singular");
      return D0 * v / (c - v);
    });
    f.eta = solve_mass(assemble_mass(eta_space, {}, q), b);
  }
  const Vec2 a = p.direction;
  const Vec2 ap = perp(a);
  f.u.resize(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double wt = s.w_tilde.empty() ? 0.0 : s.w_tilde[i];
    f.u[i] = s.w[i] * a.x + wt * ap.x;
    f.u[n + i] = s.w[i] * a.y + wt * ap.y;
  }
  return f;
}

}  // namespace bouss
