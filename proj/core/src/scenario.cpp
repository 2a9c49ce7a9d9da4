#include "bouss/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include "bouss/error.hpp"
#include "bouss/rhs.hpp"
#include "bouss/vtk.hpp"

#define TOML_EXCEPTIONS 1
#include "toml.hpp"

namespace bouss {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Shortest text that reads back to the same double; used for config files.
std::string short_num(double v) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

bool inside(const Rect& r, Vec2 p) { return p.x >= r.x_min && p.x <= r.x_max && p.y >= r.y_min && p.y <= r.y_max; }

// Steps between samples for a cadence that must be a positive multiple of dt.
long cadence_steps(double cadence, double dt) {
  if (cadence == 0.0) return 1;
  const double ratio = cadence / dt;
  const long k = std::lround(ratio);
  if (k < 1 || std::abs(ratio - static_cast<double>(k)) > 1e-9 * std::max(1.0, ratio)) return -1;
  return k;
}

long total_steps(double final_time, double dt) {
  const double ratio = final_time / dt;
  const long n = std::lround(ratio);
  if (std::abs(ratio - static_cast<double>(n)) <= 1e-9 * std::max(1.0, ratio)) return n;
  return static_cast<long>(std::ceil(ratio));
}

// ---- TOML reading -------------------------------------------------------

class Section {
 public:
  Section(const toml::table& t, std::string path) : t_(t), path_(std::move(path)) {}

  // Unknown keys are errors so typos do not pass silently.
  void allow(std::initializer_list<const char*> keys) const {
    std::set<std::string> ok;
    for (const char* k : keys) ok.insert(k);
    for (const auto& [k, v] : t_) {
      if (!ok.count(std::string(k.str()))) throw ConfigError("unknown key '" + key(std::string(k.str())) + "'");
    }
  }

  bool has(const char* k) const { return t_.contains(k); }

  double real(const char* k, double fallback) const {
    const toml::node* n = t_.get(k);
    if (!n) return fallback;
    if (auto v = n->value_exact<double>()) return *v;
    if (auto v = n->value_exact<int64_t>()) return static_cast<double>(*v);
    throw ConfigError("'" + key(k) + "' must be a number");
  }

  int integer(const char* k, int fallback) const {
    const toml::node* n = t_.get(k);
    if (!n) return fallback;
    if (auto v = n->value_exact<int64_t>()) return static_cast<int>(*v);
    throw ConfigError("'" + key(k) + "' must be an integer");
  }

  std::string text(const char* k, const std::string& fallback) const {
    const toml::node* n = t_.get(k);
    if (!n) return fallback;
    if (auto v = n->value_exact<std::string>()) return *v;
    throw ConfigError("'" + key(k) + "' must be a string");
  }

  std::vector<double> reals(const char* k, std::size_t count) const {
    const toml::array* a = t_.get_as<toml::array>(k);
    if (!a) throw ConfigError("'" + key(k) + "' must be an array of " + std::to_string(count) + " numbers");
    return numbers(*a, key(k), count);
  }

  Vec2 point(const char* k, Vec2 fallback) const {
    if (!has(k)) return fallback;
    const auto v = reals(k, 2);
    return {v[0], v[1]};
  }

  std::optional<Section> table(const char* k) const {
    const toml::node* n = t_.get(k);
    if (!n) return std::nullopt;
    const toml::table* t = n->as_table();
    if (!t) throw ConfigError("'" + key(k) + "' must be a table");
    return Section(*t, key(k));
  }

  const toml::table& raw() const { return t_; }
  std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  static std::vector<double> numbers(const toml::array& a, const std::string& name, std::size_t count) {
    if (a.size() != count) throw ConfigError("'" + name + "' must have " + std::to_string(count) + " entries");
    std::vector<double> out;
    for (const auto& e : a) {
      if (auto v = e.value_exact<double>()) {
        out.push_back(*v);
      } else if (auto w = e.value_exact<int64_t>()) {
        out.push_back(static_cast<double>(*w));
      } else {
        throw ConfigError("'" + name + "' entries must be numbers");
      }
    }
    return out;
  }

 private:
  const toml::table& t_;
  std::string path_;
};

template <class F>
auto config_value(const std::string& name, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("'" + name + "': " + e.what());
  }
}

MeshKind parse_mesh_kind(const std::string& s) {
  if (s == "rectangle") return MeshKind::rectangle;
  if (s == "cylinder_channel") return MeshKind::cylinder_channel;
  if (s == "file") return MeshKind::file;
  throw ConfigError("'mesh.kind' must be rectangle, cylinder_channel or file, got '" + s + "'");
}

DiagonalPattern parse_pattern(const std::string& s) {
  if (s == "lower_left_to_upper_right") return DiagonalPattern::lower_left_to_upper_right;
  if (s == "mirrored") return DiagonalPattern::mirrored;
  if (s == "crossed") return DiagonalPattern::crossed;
  throw ConfigError("'mesh.pattern' must be lower_left_to_upper_right, mirrored or crossed, got '" + s + "'");
}

BathymetryKind parse_bathymetry_kind(const std::string& s) {
  if (s == "flat") return BathymetryKind::flat;
  if (s == "linear") return BathymetryKind::linear;
  if (s == "sloping_beach") return BathymetryKind::sloping_beach;
  if (s == "submerged_bar") return BathymetryKind::submerged_bar;
  throw ConfigError("'bathymetry.kind' must be flat, linear, sloping_beach or submerged_bar, got '" + s + "'");
}

InitialKind parse_initial_kind(const std::string& s) {
  if (s == "rest") return InitialKind::rest;
  if (s == "solitary") return InitialKind::solitary;
  if (s == "file") return InitialKind::file;
  throw ConfigError("'initial.kind' must be rest, solitary or file, got '" + s + "'");
}

LinearSolverKind parse_solver(const std::string& s) {
  if (s == "direct") return LinearSolverKind::direct;
  if (s == "iterative") return LinearSolverKind::iterative;
  throw ConfigError("'solver' must be direct or iterative, got '" + s + "'");
}

Rect parse_rect(const Section& s, const char* k, Rect fallback) {
  if (!s.has(k)) return fallback;
  const auto v = s.reals(k, 4);
  return {v[0], v[1], v[2], v[3]};
}

// ---- TOML writing -------------------------------------------------------

std::string quoted(const std::string& s) {
  std::ostringstream o;
  o << toml::value<std::string>(s);
  return o.str();
}

std::string pair_text(Vec2 p) { return "[" + short_num(p.x) + ", " + short_num(p.y) + "]"; }

std::string rect_text(const Rect& r) {
  return "[" + short_num(r.x_min) + ", " + short_num(r.x_max) + ", " + short_num(r.y_min) + ", " + short_num(r.y_max) + "]";
}

// ---- running --------------------------------------------------------------

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

FieldState solitary_initial_state(const ScenarioConfig& config, const Bathymetry& bathymetry, const ModelSpec& model,
                                  const FunctionSpace& es, const FunctionSpace& us, ScenarioResult& result) {
  const InitialConfig& ic = config.initial;
  SolitaryWaveProblem p;
  p.amplitude = ic.amplitude;
  p.gravity = config.gravity;
  p.speed = ic.speed;
  p.direction = (1.0 / norm(ic.direction)) * ic.direction;
  p.offset = ic.offset;
  p.depth = ic.depth > 0.0 ? ic.depth : bathymetry.depth(p.offset * p.direction);
  p.gamma = ic.gamma;
  p.tolerance = ic.tolerance;
  p.max_iterations = ic.max_iterations;
  PetviashviliState st;
  if (model.kind == ModelKind::bbm) {
    try {
      st = petviashvili_bbm(p, model, es, us);
    } catch (const ConvergenceError&) {
      st = petviashvili_bbm_continuation(p, model, es, us);
      result.warnings.push_back("solitary wave needed speed continuation");
    }
  } else {
    st = petviashvili_peregrine(p, us);
  }
  result.solitary_iterations = st.iterations;
  for (auto& w : st.warnings) result.warnings.push_back(w);
  if (!bathymetry.is_flat()) {
    result.warnings.push_back("solitary wave computed over flat depth " + num(p.depth) + " on a varying bathymetry");
  }
  return recover_fields(p, st, es, us);
}

void write_mass_csv(const std::string& path, const std::vector<double>& t, const std::vector<double>& mass,
                    const std::vector<double>& drift, const std::vector<double>& error) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << "t,mass,drift,balance_error\n";
  for (std::size_t k = 0; k < t.size(); ++k) {
    f << num(t[k]) << ',' << num(mass[k]) << ',' << num(drift[k]) << ',' << num(error[k]) << '\n';
  }
  if (!f) throw Error("failed writing '" + path + "'");
}

std::string snapshot_name(int j) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snapshot_%04d.vtk", j);
  return buf;
}

}  // namespace

// ---- configuration ---------------------------------------------------------

void ScenarioConfig::validate() const {
  if (!finite_positive(dt)) throw ConfigError("dt must be positive");
  if (!std::isfinite(final_time) || final_time < dt) throw ConfigError("final_time must be at least dt");
  if (!(gauge_cadence >= 0.0) || cadence_steps(gauge_cadence, dt) < 0) {
    throw ConfigError("gauge_cadence must be 0 or a positive multiple of dt");
  }
  if (snapshot_count < 0) throw ConfigError("snapshot_count must be nonnegative");
  if (!finite_positive(gravity)) throw ConfigError("gravity must be positive");
  config_value("discretization", [&] {
    discretization.validate();
    return 0;
  });
  config_value("model", [&] { return make_model(model, theta, gravity, nonlinearity); });

  switch (mesh.kind) {
    case MeshKind::rectangle:
      if (mesh.nx < 1 || mesh.ny < 1) throw ConfigError("mesh.nx and mesh.ny must be positive");
      if (!(mesh.bounds.x_max > mesh.bounds.x_min && mesh.bounds.y_max > mesh.bounds.y_min)) {
        throw ConfigError("mesh.bounds must be [x_min, x_max, y_min, y_max] with positive extent");
      }
      break;
    case MeshKind::cylinder_channel:
      if (mesh.cylinder.cells_across < 2 || mesh.cylinder.cells_across % 2) {
        throw ConfigError("mesh.cells_across must be even and at least 2");
      }
      if (!finite_positive(mesh.cylinder.diameter)) throw ConfigError("mesh.diameter must be positive");
      break;
    case MeshKind::file:
      if (mesh.path.empty()) throw ConfigError("mesh.path is required for a file mesh");
      break;
  }

  switch (bathymetry.kind) {
    case BathymetryKind::flat:
      if (!finite_positive(bathymetry.depth)) throw ConfigError("bathymetry.depth must be positive");
      break;
    case BathymetryKind::sloping_beach:
      config_value("bathymetry", [&] {
        return Bathymetry::sloping_beach(bathymetry.depth, bathymetry.toe, bathymetry.slope, bathymetry.end);
      });
      break;
    default:
      break;
  }

  switch (initial.kind) {
    case InitialKind::rest:
      break;
    case InitialKind::solitary:
      if (!finite_positive(initial.amplitude)) throw ConfigError("initial.amplitude must be positive");
      if (!(initial.depth >= 0.0)) throw ConfigError("initial.depth must be nonnegative");
      if (!(norm(initial.direction) > 0.0)) throw ConfigError("initial.direction must be nonzero");
      if (!(initial.speed >= 0.0)) throw ConfigError("initial.speed must be nonnegative");
      if (!finite_positive(initial.tolerance)) throw ConfigError("initial.tolerance must be positive");
      if (initial.max_iterations < 1) throw ConfigError("initial.max_iterations must be positive");
      break;
    case InitialKind::file:
      if (initial.path.empty()) throw ConfigError("initial.path is required for file initial data");
      break;
  }

  std::set<std::string> names;
  for (const auto& g : gauges) {
    if (g.name.empty()) throw ConfigError("gauge names must be nonempty");
    if (g.name.find_first_of(",\"\n") != std::string::npos) {
      throw ConfigError("gauge name '" + g.name + "' contains a comma, quote or newline");
    }
    if (!names.insert(g.name).second) throw ConfigError("duplicate gauge name '" + g.name + "'");
    const Rect box = mesh.kind == MeshKind::cylinder_channel ? mesh.cylinder.channel : mesh.bounds;
    if (mesh.kind != MeshKind::file && !inside(box, g.position)) {
      throw ConfigError("gauge '" + g.name + "' at " + pair_text(g.position) + " lies outside the domain");
    }
  }
  if (sponge) {
    if (!(sponge->mu_max >= 0.0)) throw ConfigError("sponge.mu_max must be nonnegative");
    for (const auto& [a, b] : sponge->regions) {
      if (!(a != b)) throw ConfigError("sponge regions need distinct inner and outer edges");
    }
  }
  if (wavemaker && !finite_positive(wavemaker->period)) throw ConfigError("wavemaker.period must be positive");
}

std::vector<std::string> builtin_scenario_names() { return {"cylinder", "shoaling", "submerged_bar"}; }

ScenarioConfig builtin_scenario(const std::string& name) {
  ScenarioConfig c;
  c.name = name;
  c.model = ModelKind::bbm;
  c.discretization = Discretization{1, 2, 50.0, 0};
  if (name == "cylinder") {
    c.mesh.kind = MeshKind::cylinder_channel;
    c.mesh.cylinder = CylinderChannelSpec{};
    c.mesh.cylinder.cells_across = 16;
    c.bathymetry.kind = BathymetryKind::flat;
    c.bathymetry.depth = 0.15;
    c.initial.kind = InitialKind::solitary;
    c.initial.amplitude = 0.0375;
    c.initial.offset = 2.085;
    c.gauges = {{"wg1", {4.4, 0.275}},   {"wg2", {4.5, 0.170}},   {"wg3", {4.5, 0.045}},
                {"wg4", {4.6, 0.275}},   {"wg5", {4.975, 0.275}}, {"wg6", {5.375, 0.275}}};
    c.dt = 1e-3;
    c.final_time = 8.0;
  } else if (name == "shoaling") {
    c.mesh.kind = MeshKind::rectangle;
    c.mesh.bounds = {-50.0, 20.0, 0.0, 1.0};
    c.mesh.nx = 700;
    c.mesh.ny = 10;
    c.bathymetry.kind = BathymetryKind::sloping_beach;
    c.bathymetry.depth = 0.7;
    c.bathymetry.toe = 0.0;
    c.bathymetry.slope = 1.0 / 50.0;
    c.bathymetry.end = 20.0;
    c.initial.kind = InitialKind::solitary;
    c.initial.amplitude = 0.07;
    c.initial.offset = -30.0;
    c.gauges = {{"g1", {0.0, 0.5}}, {"g2", {16.25, 0.5}}, {"g3", {17.75, 0.5}}};
    c.dt = 1e-3;
    c.final_time = 30.0;
  } else if (name == "submerged_bar") {
    c.mesh.kind = MeshKind::rectangle;
    c.mesh.bounds = {-15.0, 35.0, 0.0, 1.0};
    c.mesh.nx = 250;
    c.mesh.ny = 5;
    c.bathymetry.kind = BathymetryKind::submerged_bar;
    c.initial.kind = InitialKind::rest;
    c.wavemaker = WavemakerSpec{};
    c.sponge = SpongeSpec{{{0.0, -15.0}, {25.0, 35.0}}, 10.0};
    const double xs[] = {10.5, 12.5, 13.5, 14.5, 15.7, 17.3};
    for (int i = 0; i < 6; ++i) c.gauges.push_back({"g" + std::to_string(i + 1), {xs[i], 0.5}});
    c.dt = 0.1;
    c.final_time = 40.0;
  } else {
    throw InvalidArgument("unknown scenario '" + name + "' (expected cylinder, shoaling or submerged_bar)");
  }
  return c;
}

ScenarioConfig parse_scenario_config(std::istream& in, const std::string& source) {
  toml::table doc;
  try {
    doc = toml::parse(in, source);
  } catch (const toml::parse_error& e) {
    throw ConfigError(source + ":" + std::to_string(e.source().begin.line) + ": " + std::string(e.description()));
  }
  const Section top(doc, "");
  top.allow({"name", "final_time", "dt", "gauge_cadence", "snapshot_count", "solver", "gravity", "model",
             "discretization", "mesh", "bathymetry", "initial", "gauges", "sponge", "wavemaker"});

  ScenarioConfig c;
  c.name = top.text("name", c.name);
  c.final_time = top.real("final_time", c.final_time);
  c.dt = top.real("dt", c.dt);
  c.gauge_cadence = top.real("gauge_cadence", c.gauge_cadence);
  c.snapshot_count = top.integer("snapshot_count", c.snapshot_count);
  c.solver = parse_solver(top.text("solver", "direct"));
  c.gravity = top.real("gravity", c.gravity);

  if (auto m = top.table("model")) {
    m->allow({"kind", "theta", "nonlinearity"});
    c.model = config_value("model.kind", [&] { return parse_model_kind(m->text("kind", "bbm")); });
    if (m->has("theta")) c.theta = m->real("theta", 0.0);
    if (m->has("nonlinearity")) {
      c.nonlinearity = config_value("model.nonlinearity", [&] { return parse_nonlinearity(m->text("nonlinearity", "")); });
    }
  }

  if (auto d = top.table("discretization")) {
    d->allow({"degree_eta", "degree_u", "nitsche_constant", "quadrature_degree"});
    c.discretization.r1 = d->integer("degree_eta", c.discretization.r1);
    c.discretization.r2 = d->integer("degree_u", c.discretization.r2);
    c.discretization.nitsche_constant = d->real("nitsche_constant", c.discretization.nitsche_constant);
    c.discretization.quadrature_degree = d->integer("quadrature_degree", c.discretization.quadrature_degree);
  }

  if (auto m = top.table("mesh")) {
    c.mesh.kind = parse_mesh_kind(m->text("kind", "rectangle"));
    switch (c.mesh.kind) {
      case MeshKind::rectangle:
        m->allow({"kind", "bounds", "nx", "ny", "pattern"});
        c.mesh.bounds = parse_rect(*m, "bounds", c.mesh.bounds);
        c.mesh.nx = m->integer("nx", c.mesh.nx);
        c.mesh.ny = m->integer("ny", c.mesh.ny);
        c.mesh.pattern = parse_pattern(m->text("pattern", to_string(c.mesh.pattern)));
        break;
      case MeshKind::cylinder_channel: {
        m->allow({"kind", "channel", "center", "diameter", "cells_across", "radial_layers"});
        auto& cy = c.mesh.cylinder;
        cy.channel = parse_rect(*m, "channel", cy.channel);
        cy.center = m->point("center", cy.center);
        cy.diameter = m->real("diameter", cy.diameter);
        cy.cells_across = m->integer("cells_across", cy.cells_across);
        cy.radial_layers = m->integer("radial_layers", cy.radial_layers);
        break;
      }
      case MeshKind::file:
        m->allow({"kind", "path"});
        c.mesh.path = m->text("path", "");
        break;
    }
  }

  if (auto b = top.table("bathymetry")) {
    auto& bc = c.bathymetry;
    bc.kind = parse_bathymetry_kind(b->text("kind", "flat"));
    switch (bc.kind) {
      case BathymetryKind::flat:
        b->allow({"kind", "depth"});
        break;
      case BathymetryKind::linear:
        b->allow({"kind", "c0", "cx", "cy"});
        break;
      case BathymetryKind::sloping_beach:
        b->allow({"kind", "depth", "toe", "slope", "end"});
        break;
      case BathymetryKind::submerged_bar:
        b->allow({"kind"});
        break;
    }
    bc.depth = b->real("depth", bc.depth);
    bc.c0 = b->real("c0", bc.c0);
    bc.cx = b->real("cx", bc.cx);
    bc.cy = b->real("cy", bc.cy);
    bc.toe = b->real("toe", bc.toe);
    bc.slope = b->real("slope", bc.slope);
    bc.end = b->real("end", bc.end);
  }

  if (auto s = top.table("initial")) {
    auto& ic = c.initial;
    ic.kind = parse_initial_kind(s->text("kind", "rest"));
    switch (ic.kind) {
      case InitialKind::rest:
        s->allow({"kind"});
        break;
      case InitialKind::solitary:
        s->allow({"kind", "amplitude", "depth", "offset", "direction", "speed", "tolerance", "gamma", "max_iterations"});
        break;
      case InitialKind::file:
        s->allow({"kind", "path"});
        break;
    }
    ic.amplitude = s->real("amplitude", ic.amplitude);
    ic.depth = s->real("depth", ic.depth);
    ic.offset = s->real("offset", ic.offset);
    ic.direction = s->point("direction", ic.direction);
    ic.speed = s->real("speed", ic.speed);
    ic.tolerance = s->real("tolerance", ic.tolerance);
    ic.gamma = s->real("gamma", ic.gamma);
    ic.max_iterations = s->integer("max_iterations", ic.max_iterations);
    ic.path = s->text("path", "");
  }

  if (const toml::node* g = doc.get("gauges")) {
    const toml::array* arr = g->as_array();
    if (!arr) throw ConfigError("'gauges' must be an array of tables");
    for (std::size_t i = 0; i < arr->size(); ++i) {
      const toml::table* t = (*arr)[i].as_table();
      if (!t) throw ConfigError("'gauges' must be an array of tables");
      const Section s(*t, "gauges[" + std::to_string(i) + "]");
      s.allow({"name", "position"});
      if (!s.has("name") || !s.has("position")) throw ConfigError(s.key("name") + " and position are required");
      c.gauges.push_back({s.text("name", ""), s.point("position", {})});
    }
  }

  if (auto s = top.table("sponge")) {
    s->allow({"regions", "mu_max"});
    SpongeSpec sp;
    sp.mu_max = s->real("mu_max", sp.mu_max);
    const toml::array* regions = s->raw().get_as<toml::array>("regions");
    if (!regions) throw ConfigError("'sponge.regions' must be an array of [inner, outer] pairs");
    for (const auto& r : *regions) {
      const toml::array* pair = r.as_array();
      if (!pair) throw ConfigError("'sponge.regions' must be an array of [inner, outer] pairs");
      const auto v = Section::numbers(*pair, "sponge.regions", 2);
      sp.regions.emplace_back(v[0], v[1]);
    }
    c.sponge = sp;
  }

  if (auto s = top.table("wavemaker")) {
    s->allow({"amplitude", "center", "period"});
    WavemakerSpec w;
    w.amplitude = s->real("amplitude", w.amplitude);
    w.center = s->real("center", w.center);
    w.period = s->real("period", w.period);
    c.wavemaker = w;
  }

  c.validate();
  return c;
}

ScenarioConfig load_scenario_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config '" + path + "'");
  return parse_scenario_config(f, path);
}

void write_scenario_config(std::ostream& out, const ScenarioConfig& c) {
  out << "name = " << quoted(c.name) << '\n';
  out << "final_time = " << short_num(c.final_time) << '\n';
  out << "dt = " << short_num(c.dt) << '\n';
  out << "gauge_cadence = " << short_num(c.gauge_cadence) << '\n';
  out << "snapshot_count = " << c.snapshot_count << '\n';
  out << "solver = " << quoted(to_string(c.solver)) << '\n';
  out << "gravity = " << short_num(c.gravity) << '\n';

  out << "\n[model]\nkind = " << quoted(to_string(c.model)) << '\n';
  if (c.theta) out << "theta = " << short_num(*c.theta) << '\n';
  if (c.nonlinearity) out << "nonlinearity = " << quoted(to_string(*c.nonlinearity)) << '\n';

  const auto& d = c.discretization;
  out << "\n[discretization]\ndegree_eta = " << d.r1 << "\ndegree_u = " << d.r2
      << "\nnitsche_constant = " << short_num(d.nitsche_constant) << "\nquadrature_degree = " << d.quadrature_degree << '\n';

  out << "\n[mesh]\nkind = " << quoted(to_string(c.mesh.kind)) << '\n';
  switch (c.mesh.kind) {
    case MeshKind::rectangle:
      out << "bounds = " << rect_text(c.mesh.bounds) << "\nnx = " << c.mesh.nx << "\nny = " << c.mesh.ny
          << "\npattern = " << quoted(to_string(c.mesh.pattern)) << '\n';
      break;
    case MeshKind::cylinder_channel: {
      const auto& cy = c.mesh.cylinder;
      out << "channel = " << rect_text(cy.channel) << "\ncenter = " << pair_text(cy.center)
          << "\ndiameter = " << short_num(cy.diameter) << "\ncells_across = " << cy.cells_across
          << "\nradial_layers = " << cy.radial_layers << '\n';
      break;
    }
    case MeshKind::file:
      out << "path = " << quoted(c.mesh.path) << '\n';
      break;
  }

  const auto& b = c.bathymetry;
  out << "\n[bathymetry]\nkind = " << quoted(to_string(b.kind)) << '\n';
  switch (b.kind) {
    case BathymetryKind::flat:
      out << "depth = " << short_num(b.depth) << '\n';
      break;
    case BathymetryKind::linear:
      out << "c0 = " << short_num(b.c0) << "\ncx = " << short_num(b.cx) << "\ncy = " << short_num(b.cy) << '\n';
      break;
    case BathymetryKind::sloping_beach:
      out << "depth = " << short_num(b.depth) << "\ntoe = " << short_num(b.toe) << "\nslope = " << short_num(b.slope)
          << "\nend = " << short_num(b.end) << '\n';
      break;
    case BathymetryKind::submerged_bar:
      break;
  }

  const auto& ic = c.initial;
  out << "\n[initial]\nkind = " << quoted(to_string(ic.kind)) << '\n';
  if (ic.kind == InitialKind::solitary) {
    out << "amplitude = " << short_num(ic.amplitude) << "\ndepth = " << short_num(ic.depth) << "\noffset = " << short_num(ic.offset)
        << "\ndirection = " << pair_text(ic.direction) << "\nspeed = " << short_num(ic.speed)
        << "\ntolerance = " << short_num(ic.tolerance) << "\ngamma = " << short_num(ic.gamma)
        << "\nmax_iterations = " << ic.max_iterations << '\n';
  } else if (ic.kind == InitialKind::file) {
    out << "path = " << quoted(ic.path) << '\n';
  }

  if (c.sponge) {
    out << "\n[sponge]\nmu_max = " << short_num(c.sponge->mu_max) << "\nregions = [";
    for (std::size_t i = 0; i < c.sponge->regions.size(); ++i) {
      const auto& [a, bb] = c.sponge->regions[i];
      out << (i ? ", " : "") << "[" << short_num(a) << ", " << short_num(bb) << "]";
    }
    out << "]\n";
  }
  if (c.wavemaker) {
    out << "\n[wavemaker]\namplitude = " << short_num(c.wavemaker->amplitude) << "\ncenter = " << short_num(c.wavemaker->center)
        << "\nperiod = " << short_num(c.wavemaker->period) << '\n';
  }
  for (const auto& g : c.gauges) {
    out << "\n[[gauges]]\nname = " << quoted(g.name) << "\nposition = " << pair_text(g.position) << '\n';
  }
}

Triangulation build_mesh(const MeshConfig& config) {
  switch (config.kind) {
    case MeshKind::rectangle:
      return build_rectangle_mesh(config.bounds, config.nx, config.ny, config.pattern);
    case MeshKind::cylinder_channel:
      return build_cylinder_channel_mesh(config.cylinder);
    case MeshKind::file:
      return import_mesh(config.path);
  }
  throw InvalidArgument("unknown mesh kind");
}

Bathymetry build_bathymetry(const BathymetryConfig& c) {
  switch (c.kind) {
    case BathymetryKind::flat:
      return Bathymetry::flat(c.depth);
    case BathymetryKind::linear:
      return Bathymetry::linear(c.c0, c.cx, c.cy);
    case BathymetryKind::sloping_beach:
      return Bathymetry::sloping_beach(c.depth, c.toe, c.slope, c.end);
    case BathymetryKind::submerged_bar:
      return Bathymetry::submerged_bar();
  }
  throw InvalidArgument("unknown bathymetry kind");
}

void write_gauge_csv(std::ostream& out, const GaugeRecord& r) {
  out << 't';
  for (const auto& n : r.names) out << ',' << n;
  out << '\n';
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    out << num(r.times[k]);
    for (const auto& v : r.values) out << ',' << num(v[k]);
    out << '\n';
  }
}

ScenarioResult run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  config.validate();
  ScenarioResult result;
  const Triangulation mesh = build_mesh(config.mesh);
  const Bathymetry bathymetry = build_bathymetry(config.bathymetry);
  const ModelSpec model = make_model(config.model, config.theta, config.gravity, config.nonlinearity);

  const FieldEvaluator evaluator(mesh);
  std::vector<Vec2> points;
  for (const auto& g : config.gauges) {
    try {
      evaluator.locate(g.position);
    } catch (const LocationError&) {
      throw ConfigError("gauge '" + g.name + "' at " + pair_text(g.position) + " lies outside the mesh");
    }
    points.push_back(g.position);
    result.gauges.names.push_back(g.name);
  }
  result.gauges.values.resize(points.size());

  const Semidiscretization system(mesh, model, bathymetry, config.discretization, config.sponge, config.wavemaker);
  const FunctionSpace& es = system.eta_space();
  const FunctionSpace& us = system.u_space();

  FieldState state = system.zero_state();
  switch (config.initial.kind) {
    case InitialKind::rest:
      break;
    case InitialKind::solitary:
      state = solitary_initial_state(config, bathymetry, model, es, us, result);
      break;
    case InitialKind::file:
      state = config_value("initial.path", [&] { return snapshot_state(read_vtk(config.initial.path), es, us); });
      break;
  }
  state.time = 0.0;
  system.apply_velocity_constraints(state.u);

  const MeshMetrics metrics = mesh_metrics(mesh);
  result.h_min = metrics.h_min;
  double depth_max = 0.0;
  for (const Vec2& v : mesh.vertices()) depth_max = std::max(depth_max, bathymetry.depth(v));
  const double amplitude = std::max(max_abs(state.eta), config.wavemaker ? std::abs(config.wavemaker->amplitude) : 0.0);
  result.courant = courant_number(amplitude, depth_max, config.gravity, config.dt, metrics.h_min);

  IntegratorOptions io;
  io.dt = config.dt;
  io.solver = config.solver;
  io.reference_amplitude = amplitude;
  Integrator integrator(system, io);

  namespace fs = std::filesystem;
  const bool writing = !options.out_dir.empty();
  if (writing) fs::create_directories(options.out_dir);
  auto out_path = [&](const std::string& file) { return (fs::path(options.out_dir) / file).string(); };

  const long nsteps = total_steps(config.final_time, config.dt);
  const long every = cadence_steps(config.gauge_cadence, config.dt);
  std::vector<long> snapshot_steps;
  for (int j = 1; j <= config.snapshot_count; ++j) {
    snapshot_steps.push_back(std::lround(static_cast<double>(j) * static_cast<double>(nsteps) / config.snapshot_count));
  }

  const double mass0 = system.total_mass(state.eta);
  double source = 0.0;
  std::vector<double> mass_t, mass;
  auto sample = [&](long n) {
    const double t = static_cast<double>(n) * config.dt;
    result.gauges.times.push_back(t);
    const auto v = evaluator.scalar(es, state.eta, points);
    for (std::size_t g = 0; g < v.size(); ++g) result.gauges.values[g].push_back(v[g]);
    const double m = system.total_mass(state.eta);
    mass_t.push_back(t);
    mass.push_back(m);
    result.mass_drift.push_back(std::abs(m - mass0));
    result.mass_error.push_back(std::abs(m - mass0 - source));
    result.max_mass_drift = std::max(result.max_mass_drift, result.mass_drift.back());
    result.max_mass_error = std::max(result.max_mass_error, result.mass_error.back());
  };
  auto snapshot = [&](int j) {
    const std::string p = out_path(snapshot_name(j));
    write_vtk(p, es, us, state, config.name + " t=" + num(state.time));
    result.snapshots.push_back(p);
  };

  sample(0);
  if (writing && config.snapshot_count > 0) snapshot(0);
  std::size_t next_snapshot = 0;
  for (long n = 1; n <= nsteps; ++n) {
    FieldState next;
    try {
      next = rk4_step(integrator, state);
    } catch (const BlowUpError& e) {
      std::string where = "no output directory";
      if (writing) {
        where = out_path("last_good.vtk");
        write_vtk(where, es, us, state, config.name + " last good t=" + num(state.time));
      }
      throw BlowUpError(std::string(e.what()) + "; last good state at t=" + num(state.time) + ": " + where, e.time());
    }
    state = std::move(next);
    state.time = static_cast<double>(n) * config.dt;
    source += integrator.last_step_mass_source();
    ++result.steps;
    if (n % every == 0) sample(n);
    while (next_snapshot < snapshot_steps.size() && snapshot_steps[next_snapshot] == n) {
      if (writing) snapshot(static_cast<int>(next_snapshot) + 1);
      ++next_snapshot;
    }
    if (options.progress) options.progress(static_cast<int>(n), static_cast<int>(nsteps), state.time);
  }

  if (writing) {
    std::ofstream g(out_path("gauges.csv"));
    if (!g) throw Error("cannot open '" + out_path("gauges.csv") + "' for writing");
    write_gauge_csv(g, result.gauges);
    write_mass_csv(out_path("mass.csv"), mass_t, mass, result.mass_drift, result.mass_error);
  }
  return result;
}

std::string to_string(MeshKind kind) {
  switch (kind) {
    case MeshKind::rectangle:
      return "rectangle";
    case MeshKind::cylinder_channel:
      return "cylinder_channel";
    case MeshKind::file:
      return "file";
  }
  return "?";
}

std::string to_string(BathymetryKind kind) {
  switch (kind) {
    case BathymetryKind::flat:
      return "flat";
    case BathymetryKind::linear:
      return "linear";
    case BathymetryKind::sloping_beach:
      return "sloping_beach";
    case BathymetryKind::submerged_bar:
      return "submerged_bar";
  }
  return "?";
}

std::string to_string(InitialKind kind) {
  switch (kind) {
    case InitialKind::rest:
      return "rest";
    case InitialKind::solitary:
      return "solitary";
    case InitialKind::file:
      return "file";
  }
  return "?";
}

std::string to_string(DiagonalPattern pattern) {
  switch (pattern) {
    case DiagonalPattern::lower_left_to_upper_right:
      return "lower_left_to_upper_right";
    case DiagonalPattern::mirrored:
      return "mirrored";
    case DiagonalPattern::crossed:
      return "crossed";
  }
  return "?";
}

std::string to_string(Nonlinearity nonlinearity) {
  return nonlinearity == Nonlinearity::advective ? "advective" : "conservative";
}

std::string to_string(LinearSolverKind kind) { return kind == LinearSolverKind::direct ? "direct" : "iterative"; }

}  // namespace bouss
