#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bouss/geometry.hpp"

namespace bouss {

struct Rect {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;
};

// Edge between two triangles or on the boundary. v[0] < v[1].
struct Edge {
  std::array<int, 2> v{};
  std::array<int, 2> triangles{-1, -1};
  bool on_boundary() const { return triangles[1] < 0; }
};

// A boundary edge. Vertices are ordered so the domain lies to the left.
struct BoundaryFacet {
  std::array<int, 2> v{};
  int triangle = -1;
  int edge = -1;
  int tag = 0;
  Vec2 normal;  // unit, pointing out of the domain
  double length = 0.0;
};

struct TaggedEdge {
  int a = 0;
  int b = 0;
  std::string tag;
};

struct MeshMetrics {
  double h_min = 0.0;
  double h_max = 0.0;
  double total_area = 0.0;
  std::size_t triangle_count = 0;
};

// Conforming triangulation of a polygonal domain. Immutable once built; the
// constructor reorients clockwise triangles and derives edges, boundary
// facets and outward normals from the connectivity.
class Triangulation {
 public:
  Triangulation(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
                std::span<const TaggedEdge> boundary_tags = {});

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<BoundaryFacet>& boundary_facets() const { return facets_; }
  const std::vector<std::string>& tags() const { return tag_names_; }

  // Local edge k of triangle t joins local vertices k and (k+1)%3.
  const std::array<int, 3>& triangle_edges(std::size_t t) const { return triangle_edges_[t]; }

  double area(std::size_t t) const;
  // Maximum edge length of triangle t.
  double diameter(std::size_t t) const;
  Vec2 centroid(std::size_t t) const;

  // Index of a tag name, or -1.
  int tag_index(const std::string& name) const;

 private:
  std::vector<Vec2> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<std::array<int, 3>> triangle_edges_;
  std::vector<Edge> edges_;
  std::vector<BoundaryFacet> facets_;
  std::vector<std::string> tag_names_;
};

// Split direction of each rectangle cell.
enum class DiagonalPattern {
  lower_left_to_upper_right,
  // Diagonals mirrored about the horizontal mid-line; the mesh is symmetric
  // under y -> y_min + y_max - y when ny is even.
  mirrored,
  // Four triangles per square around an added centre vertex.
  crossed,
};

Triangulation build_rectangle_mesh(const Rect& bounds, int nx, int ny,
                                   DiagonalPattern pattern = DiagonalPattern::lower_left_to_upper_right);

struct CylinderChannelSpec {
  Rect channel{-4.0, 20.0, 0.0, 0.55};
  Vec2 center{4.5, 0.275};
  double diameter = 0.16;
  // Cells across the channel width; must be even. Sets the resolution everywhere.
  int cells_across = 8;
  // Radial cell layers between the cylinder and the surrounding square block;
  // 0 picks a count matching the channel spacing.
  int radial_layers = 0;
};

// Channel with a circular hole. The hole sits in a square block spanning the
// channel width, meshed by radial projection; the mesh is mirror symmetric
// about the channel mid-line. Hole facets are tagged "cylinder", the rest "wall".
Triangulation build_cylinder_channel_mesh(const CylinderChannelSpec& spec);

// ASCII mesh format:
//   nodes N elements M boundary B
//   N lines "x y", M lines "i j k" (0-based), B lines "i j tagname".
Triangulation read_mesh(std::istream& in);
Triangulation import_mesh(const std::filesystem::path& path);
void write_mesh(std::ostream& out, const Triangulation& mesh);
void export_mesh(const std::filesystem::path& path, const Triangulation& mesh);

MeshMetrics mesh_metrics(const Triangulation& mesh);

// Barycentric point location over a uniform bucket grid.
class PointLocator {
 public:
  explicit PointLocator(const Triangulation& mesh);

  struct Hit {
    int triangle = -1;
    std::array<double, 3> barycentric{};
  };
  std::optional<Hit> locate(Vec2 p) const;

 private:
  const Triangulation* mesh_;
  Rect box_;
  int nbx_ = 1;
  int nby_ = 1;
  double dx_ = 1.0;
  double dy_ = 1.0;
  std::vector<std::vector<int>> buckets_;
};

}  // namespace bouss
