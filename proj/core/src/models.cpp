#include "bouss/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bouss/error.hpp"

namespace bouss {

double ModelSpec::beta1() const {
  switch (kind) {
    case ModelKind::classical:
      return -0.5;
    case ModelKind::modified:
    case ModelKind::simplified:
      return 0.0;
    case ModelKind::bbm:
      return c;
  }
  return 0.0;
}

double ModelSpec::beta2() const {
  switch (kind) {
    case ModelKind::classical:
      return 1.0 / 6.0;
    case ModelKind::modified:
      return -1.0 / 3.0;
    case ModelKind::simplified:
      return 0.0;
    case ModelKind::bbm:
      return d;
  }
  return 0.0;
}

ModelSpec make_model(ModelKind kind, std::optional<double> theta, double gravity,
                     std::optional<Nonlinearity> nonlinearity) {
  if (!(gravity > 0.0)) throw InvalidArgument("gravity must be positive");
  ModelSpec m;
  m.kind = kind;
  m.gravity = gravity;
  if (kind == ModelKind::bbm) {
    const double th = theta.value_or(std::sqrt(2.0 / 3.0));
    if (!(th * th >= 1.0 / 3.0 - 1e-14 && th * th <= 1.0 + 1e-14)) {
      throw InvalidArgument("theta^2 must lie in [1/3, 1], got theta = " + std::to_string(th));
    }
    m.theta = th;
    m.a = th - 0.5;
    m.b = 0.5 * ((th - 1.0) * (th - 1.0) - 1.0 / 3.0);
    m.c = th - 1.0;
    m.d = 0.5 * (th - 1.0) * (th - 1.0);
  } else if (theta) {
    throw InvalidArgument("theta applies only to the bbm model");
  }
  const bool conservative = kind == ModelKind::simplified || kind == ModelKind::modified;
  m.nonlinearity = nonlinearity.value_or(conservative ? Nonlinearity::conservative : Nonlinearity::advective);
  return m;
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "classical" || name == "peregrine") return ModelKind::classical;
  if (name == "simplified") return ModelKind::simplified;
  if (name == "modified") return ModelKind::modified;
  if (name == "bbm" || name == "bbm-bbm") return ModelKind::bbm;
  throw InvalidArgument("unknown model '" + std::string(name) + "' (expected classical, simplified, modified or bbm)");
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::classical:
      return "classical";
    case ModelKind::simplified:
      return "simplified";
    case ModelKind::modified:
      return "modified";
    case ModelKind::bbm:
      return "bbm";
  }
  return "?";
}

Nonlinearity parse_nonlinearity(std::string_view name) {
  if (name == "advective") return Nonlinearity::advective;
  if (name == "conservative") return Nonlinearity::conservative;
  throw InvalidArgument("unknown nonlinearity '" + std::string(name) + "' (expected advective or conservative)");
}

double phase_speed(DispersionFamily family, double Dk) {
  if (!(Dk >= 0.0)) throw InvalidArgument("Dk must be nonnegative");
  const double k2 = Dk * Dk;
  switch (family) {
    case DispersionFamily::bbm:
      return 1.0 / (1.0 + k2 / 6.0);
    case DispersionFamily::peregrine:
      return 1.0 / std::sqrt(1.0 + k2 / 3.0);
    case DispersionFamily::euler:
      if (Dk < 1e-4) return 1.0 - k2 / 6.0;  // series of sqrt(tanh(z)/z)
      return std::sqrt(std::tanh(Dk) / Dk);
  }
  return 0.0;
}

Bathymetry::Bathymetry(DepthProfile profile, bool flat) : profile_(std::move(profile)), flat_(flat) {
  if (!profile_) throw InvalidArgument("bathymetry needs a depth profile");
}

Vec2 Bathymetry::gradient(Vec2 p) const {
  const Jet j = jet(p);
  return {j.dx, j.dy};
}

Bathymetry Bathymetry::flat(double depth) {
  if (!(depth > 0.0)) throw InvalidArgument("depth must be positive");
  return Bathymetry([depth](const Jet&, const Jet&) { return Jet(depth); }, true);
}

Bathymetry Bathymetry::linear(double c0, double cx, double cy) {
  return Bathymetry([=](const Jet& x, const Jet& y) { return c0 + cx * x + cy * y; }, cx == 0.0 && cy == 0.0);
}

Bathymetry Bathymetry::sloping_beach(double depth, double toe, double slope, double end) {
  if (!(depth > 0.0)) throw InvalidArgument("depth must be positive");
  if (!(depth - slope * (end - toe) > 0.0)) throw InvalidArgument("sloping beach reaches zero depth");
  return Bathymetry([=](const Jet& x, const Jet&) -> Jet {
    if (x.v < toe) return Jet(depth);
    if (x.v > end) return Jet(depth - slope * (end - toe));
    return depth - slope * (x - toe);
  });
}

Bathymetry Bathymetry::submerged_bar() {
  return Bathymetry([](const Jet& x, const Jet&) -> Jet {
    if (x.v >= 6.0 && x.v < 12.0) return 0.7 - 0.05 * x;
    if (x.v >= 12.0 && x.v < 14.0) return Jet(0.1);
    if (x.v >= 14.0 && x.v <= 17.0) return 0.1 * x - 1.3;
    return Jet(0.4);
  });
}

double SpongeSpec::damping(double x) const {
  double mu = 0.0;
  for (const auto& [inner, outer] : regions) {
    const double s = (x - inner) / (outer - inner);
    if (s > 0.0) mu = std::max(mu, mu_max * std::min(s, 1.0) * std::min(s, 1.0));
  }
  return mu;
}

double WavemakerSpec::omega() const { return 2.0 * std::numbers::pi / period; }

namespace {
double bump(const WavemakerSpec& w, double x) { return w.amplitude * std::exp(-4.0 * (x - w.center) * (x - w.center)); }
double bump_dx(const WavemakerSpec& w, double x) { return -8.0 * (x - w.center) * bump(w, x); }
}  // namespace

double WavemakerSpec::zeta(Vec2 p, double t) const { return bump(*this, p.x) * std::cos(-omega() * t); }
double WavemakerSpec::zeta_t(Vec2 p, double t) const { return bump(*this, p.x) * omega() * std::sin(-omega() * t); }
double WavemakerSpec::zeta_tt(Vec2 p, double t) const {
  const double w = omega();
  return -bump(*this, p.x) * w * w * std::cos(-w * t);
}
Vec2 WavemakerSpec::grad_zeta_t(Vec2 p, double t) const { return {bump_dx(*this, p.x) * omega() * std::sin(-omega() * t), 0.0}; }
Vec2 WavemakerSpec::grad_zeta_tt(Vec2 p, double t) const {
  const double w = omega();
  return {-bump_dx(*this, p.x) * w * w * std::cos(-w * t), 0.0};
}

}  // namespace bouss
