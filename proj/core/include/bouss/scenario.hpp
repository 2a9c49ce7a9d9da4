#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bouss/fem.hpp"
#include "bouss/mesh.hpp"
#include "bouss/models.hpp"
#include "bouss/solitary.hpp"
#include "bouss/timestep.hpp"

namespace bouss {

enum class MeshKind { rectangle, cylinder_channel, file };

struct MeshConfig {
  MeshKind kind = MeshKind::rectangle;
  Rect bounds{0.0, 1.0, 0.0, 1.0};
  int nx = 10;
  int ny = 10;
  DiagonalPattern pattern = DiagonalPattern::lower_left_to_upper_right;
  CylinderChannelSpec cylinder;
  std::string path;
};

enum class BathymetryKind { flat, linear, sloping_beach, submerged_bar };

struct BathymetryConfig {
  BathymetryKind kind = BathymetryKind::flat;
  // flat depth, or offshore depth of the sloping beach
  double depth = 1.0;
  // linear: D = c0 + cx x + cy y
  double c0 = 1.0, cx = 0.0, cy = 0.0;
  // sloping_beach
  double toe = 0.0, slope = 0.02, end = 20.0;
};

enum class InitialKind { rest, solitary, file };

struct InitialConfig {
  InitialKind kind = InitialKind::rest;
  // Solitary wave: amplitude, depth (0 takes the depth at the crest), crest
  // position along direction, Petviashvili settings. Speed 0 picks the default.
  double amplitude = 0.1;
  double depth = 0.0;
  double offset = 0.0;
  Vec2 direction{1.0, 0.0};
  double speed = 0.0;
  double tolerance = 1e-5;
  double gamma = 2.0;
  int max_iterations = 200;
  // Snapshot file for kind == file.
  std::string path;
};

struct Gauge {
  std::string name;
  Vec2 position;
};

struct ScenarioConfig {
  std::string name = "custom";
  MeshConfig mesh;
  ModelKind model = ModelKind::bbm;
  std::optional<double> theta;
  std::optional<Nonlinearity> nonlinearity;
  double gravity = 9.81;
  Discretization discretization;
  BathymetryConfig bathymetry;
  InitialConfig initial;
  std::vector<Gauge> gauges;
  std::optional<SpongeSpec> sponge;
  std::optional<WavemakerSpec> wavemaker;
  double final_time = 1.0;
  double dt = 0.1;
  // 0 samples gauges every step; otherwise a multiple of dt.
  double gauge_cadence = 0.0;
  // Snapshots at t = j T / snapshot_count, j = 1..count; 0 disables them.
  int snapshot_count = 10;
  LinearSolverKind solver = LinearSolverKind::direct;

  // Throws ConfigError.
  void validate() const;
};

// cylinder, shoaling, submerged_bar. Unknown names throw InvalidArgument.
ScenarioConfig builtin_scenario(const std::string& name);
std::vector<std::string> builtin_scenario_names();

// TOML reader and writer; errors are ConfigError naming the key.
ScenarioConfig parse_scenario_config(std::istream& in, const std::string& source = "<config>");
ScenarioConfig load_scenario_config(const std::string& path);
void write_scenario_config(std::ostream& out, const ScenarioConfig& config);

Triangulation build_mesh(const MeshConfig& config);
Bathymetry build_bathymetry(const BathymetryConfig& config);

struct GaugeRecord {
  std::vector<std::string> names;
  std::vector<double> times;
  // values[g][k]: gauge g at times[k]
  std::vector<std::vector<double>> values;
};

// Header t,<names...>; 17 significant digits.
void write_gauge_csv(std::ostream& out, const GaugeRecord& record);

struct ScenarioResult {
  GaugeRecord gauges;
  std::vector<std::string> snapshots;
  // At the gauge sample times: raw |int eta(t) - int eta(0)|, and the same
  // corrected by the integrated mass sources (wavemaker, sponge).
  std::vector<double> mass_drift;
  std::vector<double> mass_error;
  double max_mass_drift = 0.0;
  double max_mass_error = 0.0;
  int steps = 0;
  double h_min = 0.0;
  double courant = 0.0;
  int solitary_iterations = 0;
  std::vector<std::string> warnings;
};

struct RunOptions {
  // Empty: nothing is written.
  std::string out_dir;
  std::function<void(int step, int total, double time)> progress;
};

// Builds mesh, model and initial data, integrates to final_time, samples the
// gauges and writes gauges.csv, mass.csv and snapshot_NNNN.vtk into out_dir.
// A blow-up writes last_good.vtk first and rethrows with its path.
ScenarioResult run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

std::string to_string(MeshKind kind);
std::string to_string(BathymetryKind kind);
std::string to_string(InitialKind kind);
std::string to_string(DiagonalPattern pattern);
std::string to_string(Nonlinearity nonlinearity);
std::string to_string(LinearSolverKind kind);

}  // namespace bouss
