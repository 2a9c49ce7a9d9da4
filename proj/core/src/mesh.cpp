#include "bouss/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "bouss/error.hpp"

namespace bouss {

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

double signed_area(Vec2 a, Vec2 b, Vec2 c) { return 0.5 * cross(b - a, c - a); }

}  // namespace

Triangulation::Triangulation(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
                             std::span<const TaggedEdge> boundary_tags)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  const int nv = static_cast<int>(vertices_.size());
  if (triangles_.empty()) throw TopologyError("triangulation has no triangles");

  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    auto& tri = triangles_[t];
    for (int v : tri) {
      if (v < 0 || v >= nv) {
        throw TopologyError("triangle " + std::to_string(t) + " references vertex " + std::to_string(v) +
                            " but only " + std::to_string(nv) + " vertices exist");
      }
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
      throw TopologyError("triangle " + std::to_string(t) + " repeats a vertex");
    }
    double a = signed_area(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
    if (a < 0.0) {
      std::swap(tri[1], tri[2]);
      a = -a;
    }
    if (!(a > 0.0)) throw TopologyError("triangle " + std::to_string(t) + " is degenerate");
  }

  std::unordered_map<std::uint64_t, int> edge_ids;
  edge_ids.reserve(triangles_.size() * 2);
  triangle_edges_.resize(triangles_.size());
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (int k = 0; k < 3; ++k) {
      const int a = tri[k];
      const int b = tri[(k + 1) % 3];
      auto [it, inserted] = edge_ids.try_emplace(edge_key(a, b), static_cast<int>(edges_.size()));
      if (inserted) {
        Edge e;
        e.v = {std::min(a, b), std::max(a, b)};
        e.triangles = {static_cast<int>(t), -1};
        edges_.push_back(e);
      } else {
        Edge& e = edges_[it->second];
        if (e.triangles[1] >= 0) {
          throw TopologyError("edge (" + std::to_string(a) + "," + std::to_string(b) +
                              ") is shared by more than two triangles");
        }
        // A consistently oriented neighbour traverses the shared edge backwards.
        const auto& other = triangles_[e.triangles[0]];
        for (int m = 0; m < 3; ++m) {
          if (other[m] == a && other[(m + 1) % 3] == b) {
            throw TopologyError("triangles " + std::to_string(e.triangles[0]) + " and " + std::to_string(t) +
                                " overlap across edge (" + std::to_string(a) + "," + std::to_string(b) + ")");
          }
        }
        e.triangles[1] = static_cast<int>(t);
      }
      triangle_edges_[t][k] = it->second;
    }
  }

  std::vector<char> used(nv, 0);
  for (const auto& tri : triangles_)
    for (int v : tri) used[v] = 1;
  for (int v = 0; v < nv; ++v) {
    if (!used[v]) throw TopologyError("vertex " + std::to_string(v) + " is not used by any triangle");
  }

  tag_names_.push_back("wall");
  std::unordered_map<std::uint64_t, int> edge_tag;
  for (const auto& te : boundary_tags) {
    auto it = edge_ids.find(edge_key(te.a, te.b));
    if (it == edge_ids.end() || !edges_[it->second].on_boundary()) {
      throw TopologyError("tagged edge (" + std::to_string(te.a) + "," + std::to_string(te.b) +
                          ") is not a boundary edge");
    }
    int idx = tag_index(te.tag);
    if (idx < 0) {
      idx = static_cast<int>(tag_names_.size());
      tag_names_.push_back(te.tag);
    }
    edge_tag[edge_key(te.a, te.b)] = idx;
  }

  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const Edge& edge = edges_[e];
    if (!edge.on_boundary()) continue;
    BoundaryFacet f;
    f.triangle = edge.triangles[0];
    f.edge = static_cast<int>(e);
    const auto& tri = triangles_[f.triangle];
    // Orient along the triangle's counterclockwise traversal so the domain is on the left.
    for (int k = 0; k < 3; ++k) {
      const int a = tri[k];
      const int b = tri[(k + 1) % 3];
      if (edge_key(a, b) == edge_key(edge.v[0], edge.v[1])) f.v = {a, b};
    }
    const Vec2 d = vertices_[f.v[1]] - vertices_[f.v[0]];
    f.length = norm(d);
    f.normal = (1.0 / f.length) * perp(d);
    auto it = edge_tag.find(edge_key(f.v[0], f.v[1]));
    f.tag = it == edge_tag.end() ? 0 : it->second;
    facets_.push_back(f);
  }
}

double Triangulation::area(std::size_t t) const {
  const auto& tri = triangles_[t];
  return signed_area(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
}

double Triangulation::diameter(std::size_t t) const {
  const auto& tri = triangles_[t];
  double h = 0.0;
  for (int k = 0; k < 3; ++k) h = std::max(h, norm(vertices_[tri[(k + 1) % 3]] - vertices_[tri[k]]));
  return h;
}

Vec2 Triangulation::centroid(std::size_t t) const {
  const auto& tri = triangles_[t];
  return (1.0 / 3.0) * (vertices_[tri[0]] + vertices_[tri[1]] + vertices_[tri[2]]);
}

int Triangulation::tag_index(const std::string& name) const {
  auto it = std::find(tag_names_.begin(), tag_names_.end(), name);
  return it == tag_names_.end() ? -1 : static_cast<int>(it - tag_names_.begin());
}

Triangulation build_rectangle_mesh(const Rect& b, int nx, int ny, DiagonalPattern pattern) {
  if (nx < 1 || ny < 1) throw InvalidArgument("rectangle mesh needs nx >= 1 and ny >= 1");
  if (!(b.x_max > b.x_min) || !(b.y_max > b.y_min)) throw InvalidArgument("rectangle bounds are degenerate");

  std::vector<Vec2> verts;
  verts.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    const double y = j == ny ? b.y_max : b.y_min + (b.y_max - b.y_min) * j / ny;
    for (int i = 0; i <= nx; ++i) {
      const double x = i == nx ? b.x_max : b.x_min + (b.x_max - b.x_min) * i / nx;
      verts.push_back({x, y});
    }
  }
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  std::vector<std::array<int, 3>> tris;
  if (pattern == DiagonalPattern::crossed) {
    tris.reserve(4 * static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const int v00 = id(i, j), v10 = id(i + 1, j), v01 = id(i, j + 1), v11 = id(i + 1, j + 1);
        const int c = static_cast<int>(verts.size());
        verts.push_back(0.25 * (verts[v00] + verts[v10] + verts[v01] + verts[v11]));
        tris.push_back({v00, v10, c});
        tris.push_back({v10, v11, c});
        tris.push_back({v11, v01, c});
        tris.push_back({v01, v00, c});
      }
    }
    return Triangulation(std::move(verts), std::move(tris));
  }
  tris.reserve(2 * static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    const bool flip = pattern == DiagonalPattern::mirrored && 2 * j >= ny;
    for (int i = 0; i < nx; ++i) {
      const int v00 = id(i, j), v10 = id(i + 1, j), v01 = id(i, j + 1), v11 = id(i + 1, j + 1);
      if (!flip) {
        tris.push_back({v00, v10, v11});
        tris.push_back({v00, v11, v01});
      } else {
        tris.push_back({v00, v10, v01});
        tris.push_back({v10, v11, v01});
      }
    }
  }
  return Triangulation(std::move(verts), std::move(tris));
}

namespace {

// Collects triangles by coordinates and merges coincident vertices.
class TriangleSoup {
 public:
  explicit TriangleSoup(double tol) : tol_(tol) {}

  int vertex(Vec2 p) {
    const auto key = std::make_pair(std::llround(p.x / tol_), std::llround(p.y / tol_));
    auto [it, inserted] = ids_.try_emplace(key, static_cast<int>(verts_.size()));
    if (inserted) verts_.push_back(p);
    return it->second;
  }
  void add(Vec2 a, Vec2 b, Vec2 c) { tris_.push_back({vertex(a), vertex(b), vertex(c)}); }
  // Splits the quad a-b-c-d (counterclockwise) along its shorter diagonal.
  void add_quad(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    if (norm(c - a) <= norm(d - b)) {
      add(a, b, c);
      add(a, c, d);
    } else {
      add(a, b, d);
      add(b, c, d);
    }
  }
  std::vector<Vec2>& vertices() { return verts_; }
  std::vector<std::array<int, 3>>& triangles() { return tris_; }

 private:
  double tol_;
  std::map<std::pair<long long, long long>, int> ids_;
  std::vector<Vec2> verts_;
  std::vector<std::array<int, 3>> tris_;
};

}  // namespace

Triangulation build_cylinder_channel_mesh(const CylinderChannelSpec& spec) {
  const Rect& ch = spec.channel;
  const double width = ch.y_max - ch.y_min;
  const double half = 0.5 * width;
  const double radius = 0.5 * spec.diameter;
  const double mid = 0.5 * (ch.y_min + ch.y_max);
  const int n = spec.cells_across;
  if (n < 2 || n % 2 != 0) throw InvalidArgument("cells_across must be an even number >= 2");
  if (std::abs(spec.center.y - mid) > 1e-12 * width) {
    throw InvalidArgument("cylinder must be centred on the channel mid-line");
  }
  if (!(radius > 0.0) || radius >= 0.9 * half) throw InvalidArgument("cylinder diameter does not fit the channel");
  const double bx0 = spec.center.x - half;
  const double bx1 = spec.center.x + half;
  if (bx0 <= ch.x_min || bx1 >= ch.x_max) throw InvalidArgument("cylinder block does not fit inside the channel");

  const double spacing = width / n;
  const int layers = spec.radial_layers > 0
                         ? spec.radial_layers
                         : std::max(2, static_cast<int>(std::lround((half - radius) / spacing)));
  TriangleSoup soup(1e-9 * width);

  // Lower half first; the upper half is its mirror image.
  auto add_rect = [&](double x0, double x1) {
    const int nx = std::max(1, static_cast<int>(std::lround((x1 - x0) / spacing)));
    const int ny = n / 2;
    for (int j = 0; j < ny; ++j) {
      const double y0 = ch.y_min + (mid - ch.y_min) * j / ny;
      const double y1 = j + 1 == ny ? mid : ch.y_min + (mid - ch.y_min) * (j + 1) / ny;
      for (int i = 0; i < nx; ++i) {
        const double xa = x0 + (x1 - x0) * i / nx;
        const double xb = i + 1 == nx ? x1 : x0 + (x1 - x0) * (i + 1) / nx;
        soup.add({xa, y0}, {xb, y0}, {xb, y1});
        soup.add({xa, y0}, {xb, y1}, {xa, y1});
      }
    }
  };
  add_rect(ch.x_min, bx0);
  add_rect(bx1, ch.x_max);

  // Square boundary points from (bx0, mid) down, across the bottom and up to (bx1, mid).
  std::vector<Vec2> outer;
  const int hn = n / 2;
  for (int k = 0; k <= hn; ++k) outer.push_back({bx0, mid - half * k / hn});
  for (int k = 1; k <= n; ++k) outer.push_back({bx0 + width * k / n, ch.y_min});
  for (int k = 1; k <= hn; ++k) outer.push_back({bx1, ch.y_min + half * k / hn});
  auto ring = [&](std::size_t j, int layer) {
    const Vec2 p = outer[j];
    const Vec2 d = p - spec.center;
    const Vec2 c = spec.center + (radius / norm(d)) * d;
    const double s = static_cast<double>(layer) / layers;
    return c + s * (p - c);
  };
  for (std::size_t j = 0; j + 1 < outer.size(); ++j) {
    for (int k = 0; k < layers; ++k) {
      // Traversal order j -> j+1 is counterclockwise around the centre; outward is +k.
      soup.add_quad(ring(j, k), ring(j + 1, k), ring(j + 1, k + 1), ring(j, k + 1));
    }
  }

  std::vector<Vec2> verts = soup.vertices();
  std::vector<std::array<int, 3>> lower = soup.triangles();
  TriangleSoup full(1e-9 * width);
  auto mirror = [&](Vec2 p) { return Vec2{p.x, 2.0 * mid - p.y}; };
  for (const auto& t : lower) {
    full.add(verts[t[0]], verts[t[1]], verts[t[2]]);
    full.add(mirror(verts[t[0]]), mirror(verts[t[2]]), mirror(verts[t[1]]));
  }

  // Tag hole facets by distance from the cylinder centre.
  Triangulation untagged(full.vertices(), full.triangles());
  std::vector<TaggedEdge> tags;
  for (const auto& f : untagged.boundary_facets()) {
    const Vec2 a = untagged.vertices()[f.v[0]];
    const Vec2 b = untagged.vertices()[f.v[1]];
    if (norm(a - spec.center) < 0.5 * (radius + half) && norm(b - spec.center) < 0.5 * (radius + half)) {
      tags.push_back({f.v[0], f.v[1], "cylinder"});
    }
  }
  return Triangulation(full.vertices(), full.triangles(), tags);
}

Triangulation read_mesh(std::istream& in) {
  int line_no = 0;
  std::string line;
  auto next_line = [&]() -> std::string {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") != std::string::npos) return line;
    }
    throw ParseError("unexpected end of mesh file", line_no + 1);
  };

  std::istringstream header(next_line());
  std::string k1, k2, k3;
  long long nn = -1, ne = -1, nb = -1;
  if (!(header >> k1 >> nn >> k2 >> ne >> k3 >> nb) || k1 != "nodes" || k2 != "elements" || k3 != "boundary" ||
      nn < 0 || ne < 0 || nb < 0) {
    throw ParseError("expected header 'nodes N elements M boundary B'", line_no);
  }
  std::string rest;
  if (header >> rest) throw ParseError("trailing text in header", line_no);

  std::vector<Vec2> verts(static_cast<std::size_t>(nn));
  for (auto& v : verts) {
    std::istringstream ls(next_line());
    if (!(ls >> v.x >> v.y) || (ls >> rest)) throw ParseError("expected node line 'x y'", line_no);
    if (!std::isfinite(v.x) || !std::isfinite(v.y)) throw ParseError("non-finite node coordinate", line_no);
  }
  std::vector<std::array<int, 3>> tris(static_cast<std::size_t>(ne));
  for (auto& t : tris) {
    std::istringstream ls(next_line());
    if (!(ls >> t[0] >> t[1] >> t[2]) || (ls >> rest)) throw ParseError("expected element line 'i j k'", line_no);
  }
  std::vector<TaggedEdge> tags(static_cast<std::size_t>(nb));
  for (auto& te : tags) {
    std::istringstream ls(next_line());
    if (!(ls >> te.a >> te.b >> te.tag) || (ls >> rest)) {
      throw ParseError("expected boundary line 'i j tagname'", line_no);
    }
    if (te.a < 0 || te.b < 0 || te.a >= nn || te.b >= nn) {
      throw TopologyError("boundary line " + std::to_string(line_no) + " references a missing vertex");
    }
  }
  return Triangulation(std::move(verts), std::move(tris), tags);
}

Triangulation import_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open mesh file " + path.string());
  return read_mesh(in);
}

void write_mesh(std::ostream& out, const Triangulation& mesh) {
  out << "nodes " << mesh.num_vertices() << " elements " << mesh.num_triangles() << " boundary "
      << mesh.boundary_facets().size() << '\n';
  out << std::setprecision(17);
  for (const auto& v : mesh.vertices()) out << v.x << ' ' << v.y << '\n';
  for (const auto& t : mesh.triangles()) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& f : mesh.boundary_facets()) {
    out << f.v[0] << ' ' << f.v[1] << ' ' << mesh.tags()[f.tag] << '\n';
  }
}

void export_mesh(const std::filesystem::path& path, const Triangulation& mesh) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write mesh file " + path.string());
  write_mesh(out, mesh);
}

MeshMetrics mesh_metrics(const Triangulation& mesh) {
  MeshMetrics m;
  m.triangle_count = mesh.num_triangles();
  m.h_min = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const double h = mesh.diameter(t);
    m.h_min = std::min(m.h_min, h);
    m.h_max = std::max(m.h_max, h);
    m.total_area += mesh.area(t);
  }
  return m;
}

PointLocator::PointLocator(const Triangulation& mesh) : mesh_(&mesh) {
  const auto& vs = mesh.vertices();
  box_ = {vs[0].x, vs[0].x, vs[0].y, vs[0].y};
  for (const auto& v : vs) {
    box_.x_min = std::min(box_.x_min, v.x);
    box_.x_max = std::max(box_.x_max, v.x);
    box_.y_min = std::min(box_.y_min, v.y);
    box_.y_max = std::max(box_.y_max, v.y);
  }
  const double w = box_.x_max - box_.x_min;
  const double h = box_.y_max - box_.y_min;
  const double target = std::sqrt(static_cast<double>(mesh.num_triangles()) / 2.0 + 1.0);
  const double aspect = w / h;
  nbx_ = std::max(1, static_cast<int>(std::ceil(target * std::sqrt(aspect))));
  nby_ = std::max(1, static_cast<int>(std::ceil(target / std::sqrt(aspect))));
  dx_ = w / nbx_;
  dy_ = h / nby_;
  buckets_.resize(static_cast<std::size_t>(nbx_) * nby_);
  auto clampx = [&](double x) { return std::clamp(static_cast<int>(std::floor((x - box_.x_min) / dx_)), 0, nbx_ - 1); };
  auto clampy = [&](double y) { return std::clamp(static_cast<int>(std::floor((y - box_.y_min) / dy_)), 0, nby_ - 1); };
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    double x0 = vs[tri[0]].x, x1 = x0, y0 = vs[tri[0]].y, y1 = y0;
    for (int k = 1; k < 3; ++k) {
      x0 = std::min(x0, vs[tri[k]].x);
      x1 = std::max(x1, vs[tri[k]].x);
      y0 = std::min(y0, vs[tri[k]].y);
      y1 = std::max(y1, vs[tri[k]].y);
    }
    for (int j = clampy(y0); j <= clampy(y1); ++j)
      for (int i = clampx(x0); i <= clampx(x1); ++i) buckets_[j * nbx_ + i].push_back(static_cast<int>(t));
  }
}

std::optional<PointLocator::Hit> PointLocator::locate(Vec2 p) const {
  const double tol = 1e-12;
  if (p.x < box_.x_min - tol * dx_ || p.x > box_.x_max + tol * dx_ || p.y < box_.y_min - tol * dy_ ||
      p.y > box_.y_max + tol * dy_) {
    return std::nullopt;
  }
  const int i = std::clamp(static_cast<int>(std::floor((p.x - box_.x_min) / dx_)), 0, nbx_ - 1);
  const int j = std::clamp(static_cast<int>(std::floor((p.y - box_.y_min) / dy_)), 0, nby_ - 1);
  const auto& vs = mesh_->vertices();
  std::optional<Hit> best;
  double best_min = -std::numeric_limits<double>::infinity();
  for (int t : buckets_[j * nbx_ + i]) {
    const auto& tri = mesh_->triangles()[t];
    const Vec2 a = vs[tri[0]], b = vs[tri[1]], c = vs[tri[2]];
    const double det = cross(b - a, c - a);
    const double l1 = cross(p - a, c - a) / det;
    const double l2 = cross(b - a, p - a) / det;
    const double l0 = 1.0 - l1 - l2;
    const double m = std::min({l0, l1, l2});
    if (m > best_min) {
      best_min = m;
      best = Hit{t, {l0, l1, l2}};
    }
  }
  if (!best || best_min < -1e-10) return std::nullopt;
  return best;
}

}  // namespace bouss
