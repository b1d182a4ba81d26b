#pragma once
// Scenario files, field output and post-processing.
#include "rodfsi/fsi.hpp"

#include <cstdio>
#include <map>
#include <string>
#include <vector>

namespace rodfsi::io {

struct InletSpec {
  bool enabled = false;
  double t_open = 0.0;  // zero velocity before, quartic profile after
  double scale = 1.0;
};

struct OutputSpec {
  double t_end = 1.0;
  int vtk_every = 0;  // steps between field dumps; 0 writes only the final state
};

struct ScenarioSpec {
  std::string name = "custom";
  mesh::DomainSpec domain;
  mesh::Sizing sizing;
  kin::BodyGeometry geometry;
  kin::KinematicMode mode = kin::KinematicMode::AEqualsInverseNorm;
  int n_el = 8;
  rod::ElasticLaw law;
  fluid::Rheology rheology = fluid::Newtonian{1.0};
  std::optional<fsi::FrictionModel> friction;
  InletSpec inlet;
  std::vector<int> locked_dofs;
  fsi::SchemeConfig scheme;
  OutputSpec output;

  fsi::Problem problem() const;
};

// rollup, halfcircle, cantilever, swimmer, swimmer_thinning, swimmer_thickening.
std::vector<std::string> preset_names();
ScenarioSpec preset(const std::string& name);

// Grammar: '#' comments, "[section]" headers, "key = value" lines. Numbers
// accept a trailing "pi" factor ("4pi", "-0.5pi", "pi"). Unknown sections or
// keys, duplicates and malformed values throw ConfigError with the line.
// "[scenario] name = <preset>" starts from that preset.
ScenarioSpec parse_config(const std::string& text, const std::string& source = "<string>");
ScenarioSpec load_config(const std::string& path);
// Every field, 17 significant digits; parse_config(serialize(s)) reproduces s.
std::string serialize(const ScenarioSpec& spec);
// Throws ConfigError naming the first invalid field.
void validate(const ScenarioSpec& spec);

std::string format_double(double v);

// Legacy VTK, ASCII.
void write_vtk_fluid(const std::string& path, const mesh::FluidMesh& mesh, const fluid::FluidState& state);
// Centroidal polyline sampled at `per_element` points per element, with tangents.
void write_vtk_rod(const std::string& path, const rod::RodConfig& q, int per_element = 8);

struct VtkArray {
  int components = 1;
  std::vector<double> values;
};
struct VtkData {
  std::string dataset;
  std::vector<Vec2> points;  // third coordinate dropped
  std::vector<std::vector<int>> cells;
  std::map<std::string, VtkArray> point_data;
  std::map<std::string, VtkArray> cell_data;
};
// Reads the subset of the format written above. Throws DomainError.
VtkData read_vtk(const std::string& path);

// Columns: t E visc pdiv S_term x1_left x2_left dt iters.
class EvolWriter {
 public:
  explicit EvolWriter(const std::string& path);
  ~EvolWriter();
  EvolWriter(const EvolWriter&) = delete;
  EvolWriter& operator=(const EvolWriter&) = delete;
  void write(const fsi::DiagnosticsRecord& r);

 private:
  std::FILE* f_ = nullptr;
};
void write_evol(const std::vector<fsi::DiagnosticsRecord>& records, const std::string& path);
std::vector<fsi::DiagnosticsRecord> read_evol(const std::string& path);

// Curvature mismatch (kappa - kappa0 integrated over the rod): both the
// L2 norm and the squared-integral form.
struct CurvatureError {
  double l2 = 0.0;
  double squared = 0.0;
};
CurvatureError curvature_error(const rod::RodConfig& q, const rod::ReferenceConfig& ref, const rod::ElasticLaw& law,
                               double t);
// int | |q - r_c| - radius | ds, r_c the midpoint of the two ends.
double position_error(const rod::RodConfig& q, double radius);
// |int R_E dt| over (t0, t1].
double energy_error(const std::vector<fsi::DiagnosticsRecord>& records, double E0, double t0, double t1);

}  // namespace rodfsi::io
