#include "rodfsi/io.hpp"

#include <fstream>
#include <sstream>

namespace rodfsi::io {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write '" + path + "'");
  return f;
}

void header(std::ostream& f, const char* title, const char* dataset) {
  f << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET " << dataset << '\n';
}

void points(std::ostream& f, const std::vector<Vec2>& p) {
  f << "POINTS " << p.size() << " double\n";
  for (const Vec2& x : p) f << format_double(x.x()) << ' ' << format_double(x.y()) << " 0\n";
}

void vectors(std::ostream& f, const char* name, const std::vector<Vec2>& v) {
  f << "VECTORS " << name << " double\n";
  for (const Vec2& x : v) f << format_double(x.x()) << ' ' << format_double(x.y()) << " 0\n";
}

void scalars(std::ostream& f, const char* name, const std::vector<double>& v) {
  f << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
  for (const double x : v) f << format_double(x) << '\n';
}

}  // namespace

void write_vtk_fluid(const std::string& path, const mesh::FluidMesh& mesh, const fluid::FluidState& state) {
  if (state.u.size() != mesh.nodes.size() || state.p.size() != mesh.nodes.size() ||
      static_cast<int>(state.mu_cell.size()) != mesh.n_tris())
    throw DomainError("write_vtk_fluid: state does not belong to the mesh");
  std::ofstream f = open_out(path);
  header(f, "rodfsi fluid", "UNSTRUCTURED_GRID");
  points(f, mesh.nodes);
  f << "CELLS " << mesh.n_tris() << ' ' << 4 * mesh.n_tris() << '\n';
  for (const auto& t : mesh.tris) f << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  f << "CELL_TYPES " << mesh.n_tris() << '\n';
  for (int t = 0; t < mesh.n_tris(); ++t) f << "5\n";
  f << "POINT_DATA " << mesh.n_nodes() << '\n';
  vectors(f, "velocity", state.u);
  scalars(f, "pressure", state.p);
  f << "CELL_DATA " << mesh.n_tris() << '\n';
  scalars(f, "viscosity", state.mu_cell);
  if (!f) throw Error("error writing '" + path + "'");
}

void write_vtk_rod(const std::string& path, const rod::RodConfig& q, int per_element) {
  if (per_element < 1) throw DomainError("write_vtk_rod: per_element must be positive");
  const int n = q.n_el() * per_element + 1;
  std::vector<Vec2> x(n), d(n);
  for (int k = 0; k < n; ++k) {
    const double s = q.S() * k / (n - 1);
    x[k] = q.eval(s, 0);
    d[k] = q.eval(s, 1);
  }
  std::ofstream f = open_out(path);
  header(f, "rodfsi rod", "POLYDATA");
  points(f, x);
  f << "LINES 1 " << n + 1 << '\n' << n;
  for (int k = 0; k < n; ++k) f << ' ' << k;
  f << '\n';
  f << "POINT_DATA " << n << '\n';
  vectors(f, "tangent", d);
  if (!f) throw Error("error writing '" + path + "'");
}

VtkData read_vtk(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DomainError("cannot open '" + path + "'");
  std::string line;
  std::getline(f, line);
  if (line.rfind("# vtk DataFile", 0) != 0) throw DomainError(path + ": not a legacy VTK file");
  std::getline(f, line);  // title
  std::getline(f, line);
  if (line != "ASCII") throw DomainError(path + ": only ASCII files are supported");
  VtkData d;
  std::string word;
  std::map<std::string, VtkArray>* data = nullptr;
  std::size_t count = 0;
  auto need = [&](bool ok) {
    if (!ok) throw DomainError(path + ": malformed section '" + word + "'");
  };
  while (f >> word) {
    if (word == "DATASET") {
      f >> d.dataset;
    } else if (word == "POINTS") {
      std::size_t n;
      std::string type;
      need(static_cast<bool>(f >> n >> type));
      d.points.resize(n);
      double z;
      for (auto& p : d.points) need(static_cast<bool>(f >> p.x() >> p.y() >> z));
    } else if (word == "CELLS" || word == "LINES" || word == "POLYGONS") {
      std::size_t n, total;
      need(static_cast<bool>(f >> n >> total));
      for (std::size_t c = 0; c < n; ++c) {
        int k;
        need(static_cast<bool>(f >> k) && k >= 0);
        std::vector<int> cell(k);
        for (int& v : cell) need(static_cast<bool>(f >> v));
        d.cells.push_back(std::move(cell));
      }
    } else if (word == "CELL_TYPES") {
      std::size_t n;
      need(static_cast<bool>(f >> n));
      int t;
      for (std::size_t c = 0; c < n; ++c) need(static_cast<bool>(f >> t));
    } else if (word == "POINT_DATA" || word == "CELL_DATA") {
      need(static_cast<bool>(f >> count));
      data = word == "POINT_DATA" ? &d.point_data : &d.cell_data;
    } else if (word == "SCALARS" || word == "VECTORS") {
      need(data != nullptr);
      std::string name, type;
      need(static_cast<bool>(f >> name >> type));
      VtkArray a;
      if (word == "SCALARS") {
        std::getline(f, line);
        std::istringstream rest(line);
        if (!(rest >> a.components)) a.components = 1;
        std::string lt, table;
        need(static_cast<bool>(f >> lt >> table) && lt == "LOOKUP_TABLE");
      } else {
        a.components = 3;
      }
      a.values.resize(count * a.components);
      for (double& v : a.values) need(static_cast<bool>(f >> v));
      (*data)[name] = std::move(a);
    } else {
      throw DomainError(path + ": unsupported keyword '" + word + "'");
    }
  }
  return d;
}

}  // namespace rodfsi::io
