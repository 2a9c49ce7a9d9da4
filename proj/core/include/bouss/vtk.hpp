#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "bouss/fem.hpp"

namespace bouss {

// Legacy ASCII unstructured grid: mesh vertices as POINTS, triangles as
// CELLS, POINT_DATA with SCALARS eta and VECTORS u (z = 0) at the vertices.
// A dataset-level FIELD block carries the time, the degrees and the full
// coefficient vectors so snapshots of higher-degree fields read back exactly.
void write_vtk(std::ostream& out, const FunctionSpace& eta_space, const FunctionSpace& u_space, const FieldState& state,
               const std::string& title = "bouss snapshot");
void write_vtk(const std::string& path, const FunctionSpace& eta_space, const FunctionSpace& u_space,
               const FieldState& state, const std::string& title = "bouss snapshot");

struct VtkSnapshot {
  std::vector<Vec2> points;
  std::vector<std::array<int, 3>> cells;
  std::vector<double> eta;  // per point
  std::vector<Vec2> u;      // per point
  // Present when the FIELD block was found; otherwise degrees are 1 and the
  // coefficients equal the point data.
  double time = 0.0;
  int eta_degree = 1;
  int u_degree = 1;
  std::vector<double> eta_coefficients;
  std::vector<double> u_coefficients;
};

// Throws ParseError with the offending line number.
VtkSnapshot read_vtk(std::istream& in);
VtkSnapshot read_vtk(const std::string& path);

// Field state from a snapshot, checked against the given spaces.
FieldState snapshot_state(const VtkSnapshot& snapshot, const FunctionSpace& eta_space, const FunctionSpace& u_space);

}  // namespace bouss
