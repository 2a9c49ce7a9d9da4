#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bouss/geometry.hpp"
#include "bouss/jet.hpp"

namespace bouss {

enum class ModelKind { classical, simplified, modified, bbm };
enum class Nonlinearity { advective, conservative };
// slip: u.n = 0 enforced weakly; no_slip: u = 0 enforced strongly.
enum class BoundaryKind { slip, no_slip };

struct ModelSpec {
  ModelKind kind = ModelKind::bbm;
  double theta = 0.0;
  // theta-family coefficients; zero for the Peregrine-type models.
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double gravity = 9.81;
  Nonlinearity nonlinearity = Nonlinearity::advective;

  // Momentum operator u + beta1 D grad(div(D u)) + beta2 D^2 grad(div u).
  double beta1() const;
  double beta2() const;
  // Weight of -div(D^2 grad eta) in the mass operator; zero unless bbm.
  double mass_dispersion() const { return kind == ModelKind::bbm ? a + b : 0.0; }
  BoundaryKind boundary() const { return kind == ModelKind::simplified ? BoundaryKind::no_slip : BoundaryKind::slip; }
};

// theta applies only to bbm (default sqrt(2/3)); 1/3 <= theta^2 <= 1.
// The nonlinearity defaults to the model's own form.
ModelSpec make_model(ModelKind kind, std::optional<double> theta = std::nullopt, double gravity = 9.81,
                     std::optional<Nonlinearity> nonlinearity = std::nullopt);

ModelKind parse_model_kind(std::string_view name);
std::string to_string(ModelKind kind);
Nonlinearity parse_nonlinearity(std::string_view name);

enum class DispersionFamily { bbm, peregrine, euler };
// Linear phase speed divided by sqrt(g D) at dimensionless wavenumber D k.
double phase_speed(DispersionFamily family, double Dk);

// Depth below the still water level, as a closed form in (x, y).
using DepthProfile = std::function<Jet(const Jet& x, const Jet& y)>;

class Bathymetry {
 public:
  explicit Bathymetry(DepthProfile profile, bool flat = false);

  static Bathymetry flat(double depth);
  // D = c0 + cx x + cy y.
  static Bathymetry linear(double c0, double cx, double cy);
  // depth for x < toe, then depth - slope (x - toe) up to x = end, constant after.
  static Bathymetry sloping_beach(double depth, double toe, double slope, double end);
  // Piecewise-linear bar: 0.4 offshore, ramps down over [6,12), 0.1 on [12,14), ramps up over [14,17].
  static Bathymetry submerged_bar();

  double depth(Vec2 p) const { return profile_(Jet(p.x), Jet(p.y)).v; }
  Vec2 gradient(Vec2 p) const;
  Jet jet(Vec2 p) const { return profile_(Jet::x(p.x), Jet::y(p.y)); }
  bool is_flat() const { return flat_; }
  const DepthProfile& profile() const { return profile_; }

 private:
  DepthProfile profile_;
  bool flat_;
};

// Quadratic ramp from 0 at each region's inner edge to mu_max at its outer edge.
struct SpongeSpec {
  // (inner, outer) x-coordinates; outer may lie on either side of inner.
  std::vector<std::pair<double, double>> regions;
  double mu_max = 10.0;

  double damping(double x) const;
};

// Moving bottom zeta = a exp(-4 (x - x_c)^2) cos(-omega t), omega = 2 pi / period.
struct WavemakerSpec {
  double amplitude = 0.0095;
  double center = 2.01;
  double period = 2.02;

  double omega() const;
  double zeta(Vec2 p, double t) const;
  double zeta_t(Vec2 p, double t) const;
  double zeta_tt(Vec2 p, double t) const;
  Vec2 grad_zeta_t(Vec2 p, double t) const;
  Vec2 grad_zeta_tt(Vec2 p, double t) const;
};

}  // namespace bouss
