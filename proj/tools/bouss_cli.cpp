// bouss: command line front end for scenarios, convergence studies,
// solitary-wave generation and dispersion tables.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bouss/error.hpp"
#include "bouss/fem.hpp"
#include "bouss/mesh.hpp"
#include "bouss/models.hpp"
#include "bouss/scenario.hpp"
#include "bouss/solitary.hpp"
#include "bouss/verify.hpp"
#include "bouss/vtk.hpp"

namespace fs = std::filesystem;

namespace {

struct Common {
  std::string out_dir;
  std::optional<double> dt;
  std::optional<double> tmax;
  std::optional<std::string> model;
  std::optional<double> theta;
  std::optional<int> degree_eta;
  std::optional<int> degree_u;
  bool deterministic = true;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Writes to out_dir/file when an output directory was given.
void save(const Common& c, const std::string& file, const std::string& text) {
  if (c.out_dir.empty()) return;
  fs::create_directories(c.out_dir);
  const fs::path p = fs::path(c.out_dir) / file;
  std::ofstream f(p);
  if (!f) throw bouss::Error("cannot write '" + p.string() + "'");
  f << text;
  std::cout << "wrote " << p.string() << '\n';
}

bouss::ScenarioConfig resolve_config(const std::string& what) {
  for (const auto& n : bouss::builtin_scenario_names()) {
    if (what == n) return bouss::builtin_scenario(n);
  }
  return bouss::load_scenario_config(what);
}

int cmd_run(const Common& c, const std::string& what, double cadence, std::optional<int> snapshots, bool print_config) {
  bouss::ScenarioConfig cfg = resolve_config(what);
  if (c.dt) cfg.dt = *c.dt;
  if (c.tmax) cfg.final_time = *c.tmax;
  if (c.model) {
    cfg.model = bouss::parse_model_kind(*c.model);
    if (cfg.model != bouss::ModelKind::bbm) cfg.theta.reset();
  }
  if (c.theta) cfg.theta = *c.theta;
  if (c.degree_eta) cfg.discretization.r1 = *c.degree_eta;
  if (c.degree_u) cfg.discretization.r2 = *c.degree_u;
  if (cadence >= 0.0) cfg.gauge_cadence = cadence;
  if (snapshots) cfg.snapshot_count = *snapshots;
  cfg.validate();
  if (print_config) {
    bouss::write_scenario_config(std::cout, cfg);
    return 0;
  }

  bouss::RunOptions opts;
  opts.out_dir = c.out_dir;
  int last_pct = -1;
  opts.progress = [&](int step, int total, double t) {
    const int pct = static_cast<int>(100.0 * step / total);
    if (pct / 10 != last_pct / 10) {
      std::fprintf(stderr, "  %3d%%  t = %.4g\n", pct, t);
      last_pct = pct;
    }
  };
  if (!c.out_dir.empty()) {
    fs::create_directories(c.out_dir);
    std::ofstream f(fs::path(c.out_dir) / "config.toml");
    bouss::write_scenario_config(f, cfg);
  }
  const auto t0 = std::chrono::steady_clock::now();
  const bouss::ScenarioResult r = bouss::run_scenario(cfg, opts);
  std::printf("scenario %s: %d steps, h_min %.4g, Courant %.3g\n", cfg.name.c_str(), r.steps, r.h_min, r.courant);
  if (r.solitary_iterations > 0) std::printf("solitary wave: %d Petviashvili iterations\n", r.solitary_iterations);
  std::printf("max mass drift %.3e, max mass balance error %.3e\n", r.max_mass_drift, r.max_mass_error);
  for (const auto& w : r.warnings) std::printf("warning: %s\n", w.c_str());
  if (c.out_dir.empty()) bouss::write_gauge_csv(std::cout, r.gauges);
  std::printf("elapsed %.2f s\n", seconds_since(t0));
  return 0;
}

int cmd_mms(const Common& c, std::vector<int> divisions, double nitsche) {
  const auto kind = bouss::parse_model_kind(c.model.value_or("classical"));
  const bouss::ModelSpec model = bouss::make_model(kind, c.theta);
  bouss::MmsCase mms = bouss::standard_mms_case(model);
  mms.dt = c.dt.value_or(2e-3);
  mms.final_time = c.tmax.value_or(1.0);
  const int r1 = c.degree_eta.value_or(1);
  const int r2 = c.degree_u.value_or(1);
  std::printf("MMS %s, (r1, r2) = (%d, %d), T = %g, dt = %g\n", bouss::to_string(kind).c_str(), r1, r2,
              mms.final_time, mms.dt);
  const auto t0 = std::chrono::steady_clock::now();
  const auto rec = bouss::run_mms_study(mms, r1, r2, divisions, nitsche);
  bouss::write_convergence_text(std::cout, rec);
  std::ostringstream csv;
  bouss::write_convergence_csv(csv, rec);
  save(c, "mms_" + bouss::to_string(kind) + "_" + std::to_string(r1) + std::to_string(r2) + ".csv", csv.str());
  std::printf("elapsed %.2f s\n", seconds_since(t0));
  return 0;
}

int cmd_elliptic(const Common& c, std::vector<int> divisions, double nitsche, const std::string& bathymetry) {
  const int r = c.degree_u.value_or(1);
  const auto kind = bouss::parse_model_kind(c.model.value_or("classical"));
  const bouss::ModelSpec model = bouss::make_model(kind, c.theta);
  bouss::Bathymetry bath = bouss::Bathymetry::flat(1.0);
  if (bathymetry == "sloping") {
    bath = bouss::Bathymetry::linear(1.5, -0.05, -0.05);
  } else if (bathymetry != "flat") {
    throw bouss::InvalidArgument("--bathymetry must be flat or sloping");
  }
  std::printf("elliptic %s, r = %d, C_N = %g, %s bottom\n", bouss::to_string(kind).c_str(), r, nitsche,
              bathymetry.c_str());
  const auto rec = bouss::run_elliptic_study(bath, r, nitsche, divisions, model);
  bouss::write_convergence_text(std::cout, rec);
  std::ostringstream csv;
  bouss::write_convergence_csv(csv, rec);
  save(c, "elliptic_" + bathymetry + "_r" + std::to_string(r) + ".csv", csv.str());
  return 0;
}

struct SolitaryArgs {
  double amplitude = 0.3;
  double depth = 1.0;
  double gravity = 1.0;
  double tolerance = 1e-5;
  std::vector<double> bounds{-20.0, 30.0, -1.0, 1.0};
  int nx = 250;
  int ny = 10;
  bool continuation = false;
};

int cmd_solitary(const Common& c, const SolitaryArgs& a) {
  const std::string name = c.model.value_or("bbm");
  const auto kind = bouss::parse_model_kind(name);
  const bouss::Triangulation mesh =
      bouss::build_rectangle_mesh({a.bounds[0], a.bounds[1], a.bounds[2], a.bounds[3]}, a.nx, a.ny);
  const bouss::FunctionSpace es(mesh, c.degree_eta.value_or(1));
  const bouss::FunctionSpace us(mesh, c.degree_u.value_or(1), 2);
  bouss::SolitaryWaveProblem p;
  p.amplitude = a.amplitude;
  p.depth = a.depth;
  p.gravity = a.gravity;
  p.tolerance = a.tolerance;
  bouss::PetviashviliState st;
  const auto t0 = std::chrono::steady_clock::now();
  if (kind == bouss::ModelKind::bbm) {
    const auto model = bouss::make_model(kind, c.theta, a.gravity);
    st = a.continuation ? bouss::petviashvili_bbm_continuation(p, model, es, us)
                        : bouss::petviashvili_bbm(p, model, es, us);
  } else {
    st = bouss::petviashvili_peregrine(p, us);
  }
  std::printf("%s solitary wave: A = %g, D0 = %g, g = %g, c = %.15g\n", bouss::to_string(kind).c_str(), a.amplitude,
              a.depth, a.gravity, st.speed);
  std::printf("%d iterations, R_n = %.3e, M_n = %.12f, %.2f s\n", st.iterations, st.residual, st.multiplier,
              seconds_since(t0));
  for (const auto& w : st.warnings) std::printf("warning: %s\n", w.c_str());
  std::ostringstream hist;
  hist << "iteration,residual\n";
  for (std::size_t i = 0; i < st.residual_history.size(); ++i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, st.residual_history[i]);
    hist << buf;
  }
  save(c, "petviashvili_history.csv", hist.str());
  if (!c.out_dir.empty()) {
    const bouss::FieldState f = bouss::recover_fields(p, st, es, us);
    fs::create_directories(c.out_dir);
    const std::string path = (fs::path(c.out_dir) / "solitary.vtk").string();
    bouss::write_vtk(path, es, us, f, "solitary wave");
    std::cout << "wrote " << path << '\n';
  }
  return 0;
}

int cmd_dispersion(const Common& c, std::vector<double> dks) {
  std::ostringstream csv;
  csv << "Dk,bbm,peregrine,euler\n";
  std::printf("%8s %22s %22s %22s\n", "Dk", "bbm", "peregrine", "euler");
  for (double k : dks) {
    const double b = bouss::phase_speed(bouss::DispersionFamily::bbm, k);
    const double p = bouss::phase_speed(bouss::DispersionFamily::peregrine, k);
    const double e = bouss::phase_speed(bouss::DispersionFamily::euler, k);
    std::printf("%8.4g %22.17g %22.17g %22.17g\n", k, b, p, e);
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", k, b, p, e);
    csv << buf;
  }
  save(c, "dispersion.csv", csv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite element solver for Boussinesq-Peregrine and BBM-BBM systems"};
  app.require_subcommand(1);
  app.fallthrough();

  Common c;
  app.add_option("--out-dir", c.out_dir, "Directory for CSV, VTK and config output");
  app.add_option("--dt", c.dt, "Time step (s)");
  app.add_option("--tmax", c.tmax, "Final time (s)");
  app.add_option("--model", c.model, "classical, simplified, modified or bbm");
  app.add_option("--theta", c.theta, "bbm parameter, 1/3 <= theta^2 <= 1");
  app.add_option("--degree-eta", c.degree_eta, "Polynomial degree of eta");
  app.add_option("--degree-u", c.degree_u, "Polynomial degree of u");
  // Nothing in the library draws random numbers; runs are always reproducible.
  app.add_flag("--seedless-deterministic,!--no-seedless-deterministic", c.deterministic,
               "Reproducible runs (default on)");

  auto* run = app.add_subcommand("run", "Run a scenario from a TOML file or a built-in name");
  std::string what;
  double cadence = -1.0;
  std::optional<int> snapshots;
  bool print_config = false;
  run->add_option("config", what, "Config file, or cylinder / shoaling / submerged_bar")->required();
  run->add_option("--gauge-cadence", cadence, "Gauge sampling interval (s), a multiple of dt");
  run->add_option("--snapshots", snapshots, "Number of VTK snapshots");
  run->add_flag("--print-config", print_config, "Print the resolved config as TOML and exit");

  auto* mms = app.add_subcommand("mms", "Manufactured-solution convergence study on the unit square");
  std::vector<int> divisions{8, 12, 16, 24, 32};
  double nitsche = 50.0;
  mms->add_option("--divisions", divisions, "Squares per side for each mesh")->delimiter(',');
  mms->add_option("--nitsche", nitsche, "Nitsche constant C_N");

  auto* ell = app.add_subcommand("elliptic", "Convergence of the momentum operator on the unit square");
  std::string bathymetry = "flat";
  ell->add_option("--divisions", divisions, "Squares per side for each mesh")->delimiter(',');
  ell->add_option("--nitsche", nitsche, "Nitsche constant C_N");
  ell->add_option("--bathymetry", bathymetry, "flat (D = 1) or sloping (D = 1.5 - (x + y)/20)");

  auto* sol = app.add_subcommand("solitary", "Generate a solitary wave by Petviashvili iteration");
  SolitaryArgs sa;
  sol->add_option("--amplitude", sa.amplitude, "Amplitude A");
  sol->add_option("--depth", sa.depth, "Still water depth D0");
  sol->add_option("--gravity", sa.gravity, "Gravity g");
  sol->add_option("--tolerance", sa.tolerance, "Residual tolerance");
  sol->add_option("--bounds", sa.bounds, "x_min,x_max,y_min,y_max")->delimiter(',')->expected(4);
  sol->add_option("--nx", sa.nx, "Cells along x");
  sol->add_option("--ny", sa.ny, "Cells along y");
  sol->add_flag("--continuation", sa.continuation, "Continue in speed from sqrt(g D0) (bbm only)");

  auto* disp = app.add_subcommand("dispersion", "Linear phase speeds c / sqrt(g D) of bbm, Peregrine and Euler");
  std::vector<double> dks{0.5, 1.0, 2.0, 5.0};
  disp->add_option("--dk", dks, "Dimensionless wavenumbers D k")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(c, what, cadence, snapshots, print_config);
    if (*mms) return cmd_mms(c, divisions, nitsche);
    if (*ell) return cmd_elliptic(c, divisions, nitsche, bathymetry);
    if (*sol) return cmd_solitary(c, sa);
    if (*disp) return cmd_dispersion(c, dks);
  } catch (const bouss::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const bouss::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
