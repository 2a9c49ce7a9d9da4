#include "bouss/rhs.hpp"

#include <cmath>

#include "bouss/error.hpp"

namespace bouss {

Semidiscretization::Semidiscretization(const Triangulation& mesh, ModelSpec model, Bathymetry bathymetry,
                                       Discretization disc, std::optional<SpongeSpec> sponge,
                                       std::optional<WavemakerSpec> wavemaker)
    : mesh_(&mesh),
      model_(model),
      bathymetry_(std::move(bathymetry)),
      disc_((disc.validate(), disc)),
      sponge_(std::move(sponge)),
      wavemaker_(wavemaker),
      eta_space_(mesh, disc.r1, 1),
      u_space_(mesh, disc.r2, 2),
      tab_eta_(eta_space_.basis(), triangle_rule(disc.effective_quadrature_degree())),
      tab_u_(u_space_.basis(), triangle_rule(disc.effective_quadrature_degree())) {
  const std::size_t nt = mesh.num_triangles();
  const int nq = tab_eta_.nq;
  maps_.reserve(nt);
  qp_x_.resize(nt * nq);
  qp_w_.resize(nt * nq);
  qp_depth_.resize(nt * nq);
  qp_mu_.assign(nt * nq, 0.0);
  for (std::size_t t = 0; t < nt; ++t) {
    maps_.emplace_back(mesh, t);
    const AffineMap& map = maps_.back();
    for (int q = 0; q < nq; ++q) {
      const auto& qp = tab_eta_.points[q];
      const std::size_t k = t * nq + q;
      qp_x_[k] = map.map(qp.xi, qp.eta);
      qp_w_[k] = qp.weight * std::abs(map.det);
      qp_depth_[k] = bathymetry_.depth(qp_x_[k]);
      if (sponge_) qp_mu_[k] = sponge_->damping(qp_x_[k].x);
    }
  }
  const int qdeg = disc.effective_quadrature_degree();
  mass_op_ = assemble_mass_operator(eta_space_, bathymetry_, model_, qdeg);
  momentum_op_ = assemble_momentum_operator(u_space_, bathymetry_, model_, disc.nitsche_constant, qdeg);
  if (model_.boundary() == BoundaryKind::no_slip) {
    const int n = static_cast<int>(u_space_.num_nodes());
    for (int b : u_space_.boundary_nodes()) {
      constrained_.push_back(b);
      constrained_.push_back(n + b);
    }
  }
}

std::vector<double> Semidiscretization::rhs_mass(const FieldState& s) const {
  if (s.eta.size() != eta_space_.size() || s.u.size() != u_space_.size()) {
    throw InvalidArgument("state does not match the discretization spaces");
  }
  const int nq = tab_eta_.nq;
  const int n1 = tab_eta_.nb;
  const int n2 = tab_u_.nb;
  const std::size_t nu = u_space_.num_nodes();
  const bool moving = wavemaker_.has_value();
  const double a_bbm = model_.kind == ModelKind::bbm ? model_.a : 0.0;
  std::vector<double> b(eta_space_.size(), 0.0);
  std::vector<double> local(n1);
  for (std::size_t t = 0; t < maps_.size(); ++t) {
    const AffineMap& map = maps_[t];
    const auto en = eta_space_.cell_nodes(t);
    const auto un = u_space_.cell_nodes(t);
    std::fill(local.begin(), local.end(), 0.0);
    for (int q = 0; q < nq; ++q) {
      const std::size_t k = t * nq + q;
      const double* pe = tab_eta_.phi.data() + q * n1;
      const double* pu = tab_u_.phi.data() + q * n2;
      double eta = 0.0;
      for (int i = 0; i < n1; ++i) eta += s.eta[en[i]] * pe[i];
      Vec2 u;
      for (int i = 0; i < n2; ++i) u += pu[i] * Vec2{s.u[un[i]], s.u[nu + un[i]]};
      double H = qp_depth_[k] + eta;
      double zt = 0.0;
      Vec2 gzt;
      if (moving) {
        H += wavemaker_->zeta(qp_x_[k], s.time);
        zt = wavemaker_->zeta_t(qp_x_[k], s.time);
        if (a_bbm != 0.0) gzt = (a_bbm * qp_depth_[k] * qp_depth_[k]) * wavemaker_->grad_zeta_t(qp_x_[k], s.time);
      }
      const Vec2 flux = H * u;
      const double w = qp_w_[k];
      const double src = -zt - qp_mu_[k] * eta;
      for (int i = 0; i < n1; ++i) {
        const Vec2 g = map.gradient(tab_eta_.dxi[q * n1 + i], tab_eta_.deta[q * n1 + i]);
        local[i] += w * (dot(flux + gzt, g) + src * pe[i]);
      }
    }
    for (int i = 0; i < n1; ++i) b[en[i]] += local[i];
  }
  return b;
}

std::vector<double> Semidiscretization::rhs_momentum(const FieldState& s) const {
  if (s.eta.size() != eta_space_.size() || s.u.size() != u_space_.size()) {
    throw InvalidArgument("state does not match the discretization spaces");
  }
  const int nq = tab_eta_.nq;
  const int n1 = tab_eta_.nb;
  const int n2 = tab_u_.nb;
  const std::size_t nu = u_space_.num_nodes();
  const double g = model_.gravity;
  const bool advective = model_.nonlinearity == Nonlinearity::advective;
  const bool moving = wavemaker_.has_value();
  const double forcing_scale = model_.kind == ModelKind::bbm ? -model_.c : 0.5;
  std::vector<double> b(u_space_.size(), 0.0);
  std::vector<double> lx(n2), ly(n2);
  for (std::size_t t = 0; t < maps_.size(); ++t) {
    const AffineMap& map = maps_[t];
    const auto en = eta_space_.cell_nodes(t);
    const auto un = u_space_.cell_nodes(t);
    std::fill(lx.begin(), lx.end(), 0.0);
    std::fill(ly.begin(), ly.end(), 0.0);
    for (int q = 0; q < nq; ++q) {
      const std::size_t k = t * nq + q;
      Vec2 geta;
      for (int i = 0; i < n1; ++i) {
        geta += s.eta[en[i]] * map.gradient(tab_eta_.dxi[q * n1 + i], tab_eta_.deta[q * n1 + i]);
      }
      const double* pu = tab_u_.phi.data() + q * n2;
      double u = 0, v = 0;
      Vec2 gu, gv;
      for (int i = 0; i < n2; ++i) {
        const double cu = s.u[un[i]];
        const double cv = s.u[nu + un[i]];
        const Vec2 gp = map.gradient(tab_u_.dxi[q * n2 + i], tab_u_.deta[q * n2 + i]);
        u += cu * pu[i];
        v += cv * pu[i];
        gu += cu * gp;
        gv += cv * gp;
      }
      Vec2 N = advective ? Vec2{u * gu.x + v * gu.y, u * gv.x + v * gv.y}
                         : Vec2{u * gu.x + v * gv.x, u * gu.y + v * gv.y};
      Vec2 F = -N - g * geta - qp_mu_[k] * Vec2{u, v};
      if (moving) F += (forcing_scale * qp_depth_[k]) * wavemaker_->grad_zeta_tt(qp_x_[k], s.time);
      const double w = qp_w_[k];
      for (int i = 0; i < n2; ++i) {
        lx[i] += w * F.x * pu[i];
        ly[i] += w * F.y * pu[i];
      }
    }
    for (int i = 0; i < n2; ++i) {
      b[un[i]] += lx[i];
      b[nu + un[i]] += ly[i];
    }
  }
  for (int d : constrained_) b[d] = 0.0;
  return b;
}

void Semidiscretization::apply_velocity_constraints(std::vector<double>& u) const {
  for (int d : constrained_) u[d] = 0.0;
}

FieldState Semidiscretization::zero_state(double t) const {
  FieldState s;
  s.eta.assign(eta_space_.size(), 0.0);
  s.u.assign(u_space_.size(), 0.0);
  s.time = t;
  return s;
}

}  // namespace bouss
