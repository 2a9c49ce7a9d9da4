#include "bouss/vtk.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "bouss/error.hpp"

namespace bouss {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Whitespace tokenizer that remembers line numbers.
class Tokens {
 public:
  explicit Tokens(std::istream& in) : in_(in) {}

  std::string line() {
    std::string s;
    while (std::getline(in_, s)) {
      ++line_no_;
      if (!s.empty() && s.back() == '\r') s.pop_back();
      if (s.find_first_not_of(" \t") != std::string::npos) return s;
    }
    throw ParseError("unexpected end of VTK file", line_no_);
  }

  std::string word() {
    while (!(cur_ >> std::ws) || cur_.eof()) {
      cur_.clear();
      cur_.str(line());
    }
    std::string w;
    cur_ >> w;
    return w;
  }

  double real() {
    const std::string w = word();
    try {
      std::size_t used = 0;
      const double v = std::stod(w, &used);
      if (used != w.size()) throw std::invalid_argument(w);
      return v;
    } catch (const std::exception&) {
      throw ParseError("expected a number, got '" + w + "'", line_no_);
    }
  }

  long integer() {
    const std::string w = word();
    try {
      std::size_t used = 0;
      const long v = std::stol(w, &used);
      if (used != w.size()) throw std::invalid_argument(w);
      return v;
    } catch (const std::exception&) {
      throw ParseError("expected an integer, got '" + w + "'", line_no_);
    }
  }

  void expect(const std::string& w) {
    const std::string got = word();
    if (got != w) throw ParseError("expected '" + w + "', got '" + got + "'", line_no_);
  }

  // Drops what remains of the current line.
  void skip_rest() { cur_.str(""), cur_.clear(); }
  int line_no() const { return line_no_; }

 private:
  std::istream& in_;
  std::istringstream cur_;
  int line_no_ = 0;
};

}  // namespace

void write_vtk(std::ostream& out, const FunctionSpace& es, const FunctionSpace& us, const FieldState& s,
               const std::string& title) {
  if (&es.mesh() != &us.mesh()) throw InvalidArgument("eta and velocity spaces must share one mesh");
  if (s.eta.size() != es.size() || s.u.size() != us.size()) throw InvalidArgument("state does not match the spaces");
  const auto& mesh = es.mesh();
  const std::size_t nv = mesh.num_vertices();
  const std::size_t nt = mesh.num_triangles();
  const std::size_t nu = us.num_nodes();
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "FIELD FieldData 4\n";
  out << "time 1 1 double\n" << num(s.time) << '\n';
  out << "degrees 2 1 int\n" << es.degree() << ' ' << us.degree() << '\n';
  out << "eta_coefficients 1 " << es.size() << " double\n";
  for (double v : s.eta) out << num(v) << '\n';
  out << "u_coefficients 2 " << nu << " double\n";
  for (std::size_t i = 0; i < nu; ++i) out << num(s.u[i]) << ' ' << num(s.u[nu + i]) << '\n';
  out << "POINTS " << nv << " double\n";
  for (const Vec2& p : mesh.vertices()) out << num(p.x) << ' ' << num(p.y) << " 0\n";
  out << "CELLS " << nt << ' ' << 4 * nt << '\n';
  for (const auto& t : mesh.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "CELL_TYPES " << nt << '\n';
  for (std::size_t t = 0; t < nt; ++t) out << "5\n";
  out << "POINT_DATA " << nv << '\n';
  out << "SCALARS eta double 1\nLOOKUP_TABLE default\n";
  for (std::size_t i = 0; i < nv; ++i) out << num(s.eta[i]) << '\n';
  out << "VECTORS u double\n";
  for (std::size_t i = 0; i < nv; ++i) out << num(s.u[i]) << ' ' << num(s.u[nu + i]) << " 0\n";
}

void write_vtk(const std::string& path, const FunctionSpace& es, const FunctionSpace& us, const FieldState& s,
               const std::string& title) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  write_vtk(f, es, us, s, title);
  if (!f) throw Error("failed writing '" + path + "'");
}

VtkSnapshot read_vtk(std::istream& in) {
  Tokens tk(in);
  VtkSnapshot snap;
  const std::string header = tk.line();
  if (header.rfind("# vtk DataFile", 0) != 0) throw ParseError("missing '# vtk DataFile' header", tk.line_no());
  tk.line();  // title
  if (tk.line() != "ASCII") throw ParseError("only ASCII VTK files are supported", tk.line_no());
  tk.expect("DATASET");
  tk.expect("UNSTRUCTURED_GRID");
  bool have_field = false;
  long npoint_data = -1;
  std::string w;
  for (;;) {
    try {
      w = tk.word();
    } catch (const ParseError&) {
      break;
    }
    if (w == "FIELD") {
      tk.word();
      const long n = tk.integer();
      for (long a = 0; a < n; ++a) {
        const std::string name = tk.word();
        const long comps = tk.integer();
        const long tuples = tk.integer();
        tk.word();
        if (comps < 1 || tuples < 0) throw ParseError("bad FIELD array shape for '" + name + "'", tk.line_no());
        std::vector<double> vals(static_cast<std::size_t>(comps * tuples));
        for (double& v : vals) v = tk.real();
        if (name == "time" && vals.size() == 1) {
          snap.time = vals[0];
        } else if (name == "degrees" && vals.size() == 2) {
          snap.eta_degree = static_cast<int>(vals[0]);
          snap.u_degree = static_cast<int>(vals[1]);
        } else if (name == "eta_coefficients" && comps == 1) {
          snap.eta_coefficients = std::move(vals);
        } else if (name == "u_coefficients" && comps == 2) {
          const std::size_t n2 = static_cast<std::size_t>(tuples);
          snap.u_coefficients.resize(2 * n2);
          for (std::size_t i = 0; i < n2; ++i) {
            snap.u_coefficients[i] = vals[2 * i];
            snap.u_coefficients[n2 + i] = vals[2 * i + 1];
          }
        }
      }
      have_field = true;
    } else if (w == "POINTS") {
      const long n = tk.integer();
      tk.word();
      if (n < 0) throw ParseError("negative point count", tk.line_no());
      snap.points.resize(static_cast<std::size_t>(n));
      for (auto& p : snap.points) {
        p.x = tk.real();
        p.y = tk.real();
        tk.real();
      }
    } else if (w == "CELLS") {
      const long n = tk.integer();
      tk.integer();
      if (n < 0) throw ParseError("negative cell count", tk.line_no());
      snap.cells.resize(static_cast<std::size_t>(n));
      for (auto& c : snap.cells) {
        if (tk.integer() != 3) throw ParseError("only triangle cells are supported", tk.line_no());
        for (int& v : c) {
          const long idx = tk.integer();
          if (idx < 0 || idx >= static_cast<long>(snap.points.size())) {
            throw ParseError("cell references point " + std::to_string(idx) + " out of range", tk.line_no());
          }
          v = static_cast<int>(idx);
        }
      }
    } else if (w == "CELL_TYPES") {
      const long n = tk.integer();
      if (n != static_cast<long>(snap.cells.size())) throw ParseError("CELL_TYPES count mismatch", tk.line_no());
      for (long i = 0; i < n; ++i) {
        if (tk.integer() != 5) throw ParseError("only VTK_TRIANGLE (5) cells are supported", tk.line_no());
      }
    } else if (w == "POINT_DATA") {
      npoint_data = tk.integer();
      if (npoint_data != static_cast<long>(snap.points.size())) {
        throw ParseError("POINT_DATA count does not match POINTS", tk.line_no());
      }
    } else if (w == "SCALARS") {
      const std::string name = tk.word();
      tk.skip_rest();
      tk.expect("LOOKUP_TABLE");
      tk.word();
      std::vector<double> vals(static_cast<std::size_t>(std::max(npoint_data, 0L)));
      for (double& v : vals) v = tk.real();
      if (name == "eta") snap.eta = std::move(vals);
    } else if (w == "VECTORS") {
      const std::string name = tk.word();
      tk.word();
      std::vector<Vec2> vals(static_cast<std::size_t>(std::max(npoint_data, 0L)));
      for (auto& v : vals) {
        v.x = tk.real();
        v.y = tk.real();
        tk.real();
      }
      if (name == "u") snap.u = std::move(vals);
    } else {
      throw ParseError("unexpected keyword '" + w + "'", tk.line_no());
    }
  }
  if (snap.points.empty()) throw ParseError("VTK file has no POINTS", tk.line_no());
  if (snap.eta.size() != snap.points.size()) throw ParseError("missing SCALARS eta point data", tk.line_no());
  if (snap.u.size() != snap.points.size()) throw ParseError("missing VECTORS u point data", tk.line_no());
  if (!have_field || snap.eta_coefficients.empty()) {
    snap.eta_degree = 1;
    snap.eta_coefficients = snap.eta;
  }
  if (!have_field || snap.u_coefficients.empty()) {
    snap.u_degree = 1;
    snap.u_coefficients.clear();
    for (const auto& v : snap.u) snap.u_coefficients.push_back(v.x);
    for (const auto& v : snap.u) snap.u_coefficients.push_back(v.y);
  }
  return snap;
}

VtkSnapshot read_vtk(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open '" + path + "'");
  return read_vtk(f);
}

FieldState snapshot_state(const VtkSnapshot& snap, const FunctionSpace& es, const FunctionSpace& us) {
  if (snap.points.size() != es.mesh().num_vertices() || snap.cells.size() != es.mesh().num_triangles()) {
    throw InvalidArgument("snapshot mesh does not match the simulation mesh");
  }
  if (snap.eta_degree != es.degree() || snap.u_degree != us.degree()) {
    throw InvalidArgument("snapshot degrees (" + std::to_string(snap.eta_degree) + ", " +
                          std::to_string(snap.u_degree) + ") do not match the spaces (" +
                          std::to_string(es.degree()) + ", " + std::to_string(us.degree()) + ")");
  }
  if (snap.eta_coefficients.size() != es.size() || snap.u_coefficients.size() != us.size()) {
    throw InvalidArgument("snapshot coefficient counts do not match the spaces");
  }
  return {snap.eta_coefficients, snap.u_coefficients, snap.time};
}

}  // namespace bouss
