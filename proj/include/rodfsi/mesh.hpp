#pragma once
//
// Boundary-fitted triangulation of a rectangle minus the rod body.
//
// The wet polyline is inserted first, so its nodes are mesh nodes
// 0..n_wet-1 with the exact input coordinates. The rest of the mesh is a
// constrained Delaunay triangulation refined until triangles meet an angle
// bound and a graded size field h(x) = min(h_max, h_wet + (growth-1) d(x)),
// where d is the distance to the wet polyline.
//
#include "rodfsi/common.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace rodfsi::mesh {

enum class BoundaryTag : std::uint8_t { Wet, Wall, Inlet, Outlet, Open };

const char* tag_name(BoundaryTag t);
BoundaryTag tag_from_name(const std::string& s);

enum Side { Bottom = 0, Right = 1, Top = 2, Left = 3 };

// Piece of a rectangle side: applies to side coordinates up to `upto`
// (x for bottom/top, y for left/right).
struct SidePiece {
  double upto = 0.0;
  BoundaryTag tag = BoundaryTag::Wall;
};

struct DomainSpec {
  double Lx = 3.0;
  double Ly = 3.0;
  std::array<std::vector<SidePiece>, 4> sides;

  static DomainSpec rectangle(double Lx, double Ly, BoundaryTag bottom, BoundaryTag right, BoundaryTag top,
                              BoundaryTag left);
  BoundaryTag tag_at(Side side, double coord) const;
};

struct Sizing {
  double h_wet = 0.01;
  double growth = 1.2;
  double h_max = 0.25;
  double min_angle = 20.0;      // asserted away from the wet surface
  double min_angle_wet = 10.0;  // asserted within two layers of it
  double refine_angle = 25.0;   // refinement target
  double wall_clearance = 2.0;  // in units of h_wet
  double self_gap = 0.25;       // in units of h_wet
  int max_steiner = 400000;
};

struct BoundaryEdge {
  int a = 0;  // fluid lies on the left of a -> b
  int b = 0;
  BoundaryTag tag = BoundaryTag::Wall;
};

struct FluidMesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> tris;  // counterclockwise
  std::vector<BoundaryEdge> boundary;
  std::vector<int> wet_order;
  bool wet_closed = true;
  double h_wet = 0.0;

  int n_nodes() const { return static_cast<int>(nodes.size()); }
  int n_tris() const { return static_cast<int>(tris.size()); }
  double area(int t) const;
  double min_angle_deg(int t) const;
  int count_wet_edges() const;
};

// Throws MeshError when the wet polyline self-intersects, comes closer to
// itself than self_gap*h_wet, or closer than wall_clearance*h_wet to the
// rectangle. For an open chain both endpoints must lie on one side; nodes
// within 2*wall_clearance*h_wet of an endpoint are exempt from the wall check.
void check_wet_geometry(const DomainSpec& spec, const std::vector<Vec2>& wet, bool closed, const Sizing& sizing);

// Closed wet loops are counterclockwise around the body. Open chains run
// with the body on their left and start and end on the same side.
FluidMesh triangulate(const DomainSpec& spec, const std::vector<Vec2>& wet, bool closed, const Sizing& sizing);

// Same contract as triangulate; used at every time step.
FluidMesh remesh(const DomainSpec& spec, const std::vector<Vec2>& wet, bool closed, const Sizing& sizing);

// Rectangle without a hole, nx*ny cells split along one diagonal.
FluidMesh structured_rectangle(const DomainSpec& spec, int nx, int ny);

struct ValidateOptions {
  double min_angle = 20.0;
  double min_angle_wet = 10.0;
  bool check_angles = true;
};

// Empty when every FluidMesh invariant holds.
std::vector<std::string> validate(const FluidMesh& mesh, const ValidateOptions& opts = {});

}  // namespace rodfsi::mesh
