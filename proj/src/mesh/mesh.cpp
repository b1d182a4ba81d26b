#include "rodfsi/mesh.hpp"

#include "cdt.hpp"
#include "predicates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

namespace rodfsi::mesh {

const char* tag_name(BoundaryTag t) {
  switch (t) {
    case BoundaryTag::Wet:
      return "wet";
    case BoundaryTag::Wall:
      return "wall";
    case BoundaryTag::Inlet:
      return "inlet";
    case BoundaryTag::Outlet:
      return "outlet";
    case BoundaryTag::Open:
      return "open";
  }
  return "?";
}

BoundaryTag tag_from_name(const std::string& s) {
  for (auto t : {BoundaryTag::Wet, BoundaryTag::Wall, BoundaryTag::Inlet, BoundaryTag::Outlet, BoundaryTag::Open})
    if (s == tag_name(t)) return t;
  throw ConfigError("unknown boundary tag '" + s + "'");
}

DomainSpec DomainSpec::rectangle(double Lx, double Ly, BoundaryTag bottom, BoundaryTag right, BoundaryTag top,
                                 BoundaryTag left) {
  DomainSpec d;
  d.Lx = Lx;
  d.Ly = Ly;
  d.sides[Bottom] = {{Lx, bottom}};
  d.sides[Right] = {{Ly, right}};
  d.sides[Top] = {{Lx, top}};
  d.sides[Left] = {{Ly, left}};
  return d;
}

BoundaryTag DomainSpec::tag_at(Side side, double coord) const {
  const auto& pieces = sides[side];
  if (pieces.empty()) throw ConfigError("boundary side without a tag");
  for (const auto& p : pieces)
    if (coord <= p.upto) return p.tag;
  return pieces.back().tag;
}

double FluidMesh::area(int t) const {
  const auto& T = tris[t];
  return 0.5 * cross(nodes[T[1]] - nodes[T[0]], nodes[T[2]] - nodes[T[0]]);
}

double FluidMesh::min_angle_deg(int t) const {
  const auto& T = tris[t];
  double best = 180.0;
  for (int k = 0; k < 3; ++k) {
    const Vec2 a = nodes[T[(k + 1) % 3]] - nodes[T[k]];
    const Vec2 b = nodes[T[(k + 2) % 3]] - nodes[T[k]];
    best = std::min(best, std::atan2(std::abs(cross(a, b)), a.dot(b)) * 180.0 / std::numbers::pi);
  }
  return best;
}

int FluidMesh::count_wet_edges() const {
  return static_cast<int>(
      std::count_if(boundary.begin(), boundary.end(), [](const BoundaryEdge& e) { return e.tag == BoundaryTag::Wet; }));
}

namespace {

using detail::orient2d;

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double L2 = d.squaredNorm();
  double t = L2 > 0.0 ? (p - a).dot(d) / L2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + t * d)).norm();
}

bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const int o1 = orient2d(a, b, c), o2 = orient2d(a, b, d), o3 = orient2d(c, d, a), o4 = orient2d(c, d, b);
  if (o1 != o2 && o3 != o4 && o1 * o2 <= 0 && o3 * o4 <= 0) {
    if (o1 != 0 || o2 != 0) return true;
  }
  if (o1 == 0 && o2 == 0) {
    // Collinear: overlap test on the dominant axis.
    const int ax = std::abs(b.x() - a.x()) >= std::abs(b.y() - a.y()) ? 0 : 1;
    const double lo1 = std::min(a[ax], b[ax]), hi1 = std::max(a[ax], b[ax]);
    const double lo2 = std::min(c[ax], d[ax]), hi2 = std::max(c[ax], d[ax]);
    return hi1 >= lo2 && hi2 >= lo1;
  }
  return false;
}

double segment_segment_distance(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  if (segments_intersect(a, b, c, d)) return 0.0;
  return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d), point_segment_distance(c, a, b),
                   point_segment_distance(d, a, b)});
}

// Distance to the wet polyline on a bucket grid, saturated at `cap`.
class WetDistance {
 public:
  WetDistance(const std::vector<Vec2>& wet, bool closed, double Lx, double Ly, double h, double cap) : cap_(cap) {
    const int n = static_cast<int>(wet.size());
    for (int i = 0; i + 1 < n || (closed && i < n); ++i) segs_.emplace_back(wet[i], wet[(i + 1) % n]);
    cell_ = std::max(4.0 * h, std::max(Lx, Ly) / 48.0);
    nx_ = std::max(1, static_cast<int>(std::ceil(Lx / cell_)));
    ny_ = std::max(1, static_cast<int>(std::ceil(Ly / cell_)));
    grid_.assign(static_cast<std::size_t>(nx_) * ny_, {});
    for (int s = 0; s < static_cast<int>(segs_.size()); ++s) {
      const auto& [a, b] = segs_[s];
      const int i0 = cx(std::min(a.x(), b.x())), i1 = cx(std::max(a.x(), b.x()));
      const int j0 = cy(std::min(a.y(), b.y())), j1 = cy(std::max(a.y(), b.y()));
      for (int i = i0; i <= i1; ++i)
        for (int j = j0; j <= j1; ++j) grid_[j * nx_ + i].push_back(s);
    }
  }

  double operator()(const Vec2& p) const {
    const int ci = cx(p.x()), cj = cy(p.y());
    double best = std::numeric_limits<double>::infinity();
    const int rmax = std::max(nx_, ny_);
    for (int r = 0; r <= rmax; ++r) {
      const double lower = (r - 1) * cell_;
      if (best <= lower || lower >= cap_) break;
      for (int j = cj - r; j <= cj + r; ++j) {
        if (j < 0 || j >= ny_) continue;
        for (int i = ci - r; i <= ci + r; ++i) {
          if (i < 0 || i >= nx_) continue;
          if (std::max(std::abs(i - ci), std::abs(j - cj)) != r) continue;
          for (const int s : grid_[j * nx_ + i])
            best = std::min(best, point_segment_distance(p, segs_[s].first, segs_[s].second));
        }
      }
    }
    return std::min(best, cap_);
  }

 private:
  int cx(double x) const { return std::clamp(static_cast<int>(std::floor(x / cell_)), 0, nx_ - 1); }
  int cy(double y) const { return std::clamp(static_cast<int>(std::floor(y / cell_)), 0, ny_ - 1); }

  std::vector<std::pair<Vec2, Vec2>> segs_;
  std::vector<std::vector<int>> grid_;
  double cell_ = 1.0, cap_ = 1.0;
  int nx_ = 1, ny_ = 1;
};

// Perimeter coordinate of a boundary point, counterclockwise from (0,0).
double perimeter_coord(const DomainSpec& d, const Vec2& p) {
  if (p.y() == 0.0) return p.x();
  if (p.x() == d.Lx) return d.Lx + p.y();
  if (p.y() == d.Ly) return d.Lx + d.Ly + (d.Lx - p.x());
  if (p.x() == 0.0) return 2.0 * d.Lx + d.Ly + (d.Ly - p.y());
  throw MeshError("open wet chain endpoint is not on the outer boundary");
}

Side side_of(const DomainSpec& d, double u) {
  if (u < d.Lx) return Bottom;
  if (u < d.Lx + d.Ly) return Right;
  if (u < 2.0 * d.Lx + d.Ly) return Top;
  return Left;
}

double side_coord(Side s, const Vec2& p) { return (s == Bottom || s == Top) ? p.x() : p.y(); }

Vec2 side_point(const DomainSpec& d, Side s, double c) {
  switch (s) {
    case Bottom:
      return {c, 0.0};
    case Right:
      return {d.Lx, c};
    case Top:
      return {c, d.Ly};
    default:
      return {0.0, c};
  }
}

struct OuterNode {
  Vec2 p;
  int wet_index = -1;  // >= 0 when shared with the wet chain
};

// Points strictly between a and b (same side), equidistributing 1/h.
void fill_side(const DomainSpec& d, Side s, const Vec2& a, const Vec2& b, const std::function<double(const Vec2&)>& h,
               std::vector<OuterNode>& out) {
  const double c0 = side_coord(s, a), c1 = side_coord(s, b);
  constexpr int kSamples = 400;
  std::vector<double> cum(kSamples + 1, 0.0);
  for (int k = 0; k < kSamples; ++k) {
    const double cm = c0 + (c1 - c0) * (k + 0.5) / kSamples;
    cum[k + 1] = cum[k] + std::abs(c1 - c0) / kSamples / h(side_point(d, s, cm));
  }
  const int n = std::max(1, static_cast<int>(std::lround(cum.back())));
  int k = 0;
  for (int j = 1; j < n; ++j) {
    const double target = cum.back() * j / n;
    while (k < kSamples && cum[k + 1] < target) ++k;
    const double frac = (target - cum[k]) / (cum[k + 1] - cum[k]);
    const double c = c0 + (c1 - c0) * (k + frac) / kSamples;
    out.push_back({side_point(d, s, c), -1});
  }
}

}  // namespace

void check_wet_geometry(const DomainSpec& spec, const std::vector<Vec2>& wet, bool closed, const Sizing& sizing) {
  const int n = static_cast<int>(wet.size());
  if (n < (closed ? 3 : 2)) throw MeshError("wet polyline has too few nodes");
  for (const auto& p : wet)
    if (!std::isfinite(p.x()) || !std::isfinite(p.y())) throw MeshError("wet polyline has non-finite coordinates");

  const double clear = sizing.wall_clearance * sizing.h_wet;
  for (int i = 0; i < n; ++i) {
    const Vec2& p = wet[i];
    const bool endpoint = !closed && (i == 0 || i == n - 1);
    if (endpoint) continue;
    if (!(p.x() > 0.0 && p.x() < spec.Lx && p.y() > 0.0 && p.y() < spec.Ly)) {
      std::ostringstream msg;
      msg << "wet node " << i << " at (" << p.x() << ", " << p.y() << ") lies outside the fluid rectangle";
      throw MeshError(msg.str());
    }
    if (!closed && std::min((p - wet.front()).norm(), (p - wet.back()).norm()) <= 2.0 * clear) continue;
    const double dw = std::min({p.x(), spec.Lx - p.x(), p.y(), spec.Ly - p.y()});
    if (dw < clear) {
      std::ostringstream msg;
      msg << "wet node " << i << " is " << dw << " from the outer boundary (minimum " << clear << ")";
      throw MeshError(msg.str());
    }
  }
  if (!closed) {
    const double u0 = perimeter_coord(spec, wet.front()), u1 = perimeter_coord(spec, wet.back());
    if (side_of(spec, u0) != side_of(spec, u1)) throw MeshError("open wet chain must start and end on one side");
  }

  const int ns = closed ? n : n - 1;
  const double gap = sizing.self_gap * sizing.h_wet;
  for (int i = 0; i < ns; ++i) {
    const Vec2 &a = wet[i], &b = wet[(i + 1) % n];
    if (a == b) throw MeshError("wet polyline has a repeated node");
    for (int j = i + 1; j < ns; ++j) {
      const bool adjacent = j == i + 1 || (closed && i == 0 && j == ns - 1);
      if (adjacent) continue;
      const Vec2 &c = wet[j], &d = wet[(j + 1) % n];
      if (std::max({std::min(a.x(), b.x()) - std::max(c.x(), d.x()), std::min(c.x(), d.x()) - std::max(a.x(), b.x()),
                    std::min(a.y(), b.y()) - std::max(c.y(), d.y()),
                    std::min(c.y(), d.y()) - std::max(a.y(), b.y())}) > gap)
        continue;
      const double dist = segment_segment_distance(a, b, c, d);
      if (dist == 0.0) {
        std::ostringstream msg;
        msg << "wet polyline self-intersects (segments " << i << " and " << j << ")";
        throw MeshError(msg.str());
      }
      if (dist < gap) {
        std::ostringstream msg;
        msg << "wet polyline comes within " << dist << " of itself (segments " << i << " and " << j << ")";
        throw MeshError(msg.str());
      }
    }
  }
}

FluidMesh triangulate(const DomainSpec& spec, const std::vector<Vec2>& wet, bool closed, const Sizing& sizing) {
  if (!(sizing.h_wet > 0.0) || !(sizing.growth >= 1.0) || !(sizing.h_max >= sizing.h_wet))
    throw ConfigError("invalid mesh sizing");
  check_wet_geometry(spec, wet, closed, sizing);
  const int n_wet = static_cast<int>(wet.size());

  const double d_cap = sizing.growth > 1.0 ? (sizing.h_max - sizing.h_wet) / (sizing.growth - 1.0)
                                           : std::numeric_limits<double>::infinity();
  const WetDistance dist(wet, closed, spec.Lx, spec.Ly, sizing.h_wet, std::min(d_cap, spec.Lx + spec.Ly));
  const auto h = [&](const Vec2& p) {
    return std::min(sizing.h_max, sizing.h_wet + (sizing.growth - 1.0) * dist(p));
  };

  // Outer boundary loop, counterclockwise around the fluid.
  const double P = 2.0 * (spec.Lx + spec.Ly);
  const double corners_u[4] = {0.0, spec.Lx, spec.Lx + spec.Ly, 2.0 * spec.Lx + spec.Ly};
  const Vec2 corners[4] = {{0.0, 0.0}, {spec.Lx, 0.0}, {spec.Lx, spec.Ly}, {0.0, spec.Ly}};
  std::vector<OuterNode> fixed;
  double u_start = 0.0, u_span = P;
  if (closed) {
    for (int k = 0; k < 4; ++k) fixed.push_back({corners[k], -1});
    fixed.push_back({corners[0], -1});
  } else {
    u_start = perimeter_coord(spec, wet.front());
    const double u_end = perimeter_coord(spec, wet.back());
    u_span = u_end - u_start;
    if (u_span <= 0.0) u_span += P;
    fixed.push_back({wet.front(), 0});
    for (int k = 1; k <= 4; ++k) {
      const int c = (k + static_cast<int>(std::upper_bound(corners_u, corners_u + 4, u_start) - corners_u) - 1) % 4;
      double du = corners_u[c] - u_start;
      if (du <= 0.0) du += P;
      if (du < u_span) fixed.push_back({corners[c], -1});
    }
    fixed.push_back({wet.back(), n_wet - 1});
  }
  std::vector<OuterNode> outer;
  for (std::size_t k = 0; k + 1 < fixed.size(); ++k) {
    outer.push_back(fixed[k]);
    const double um = perimeter_coord(spec, fixed[k].p);
    // Side of the piece: take the side that contains both ends.
    const Vec2 a = fixed[k].p, b = fixed[k + 1].p;
    Side s;
    if (a.y() == 0.0 && b.y() == 0.0)
      s = Bottom;
    else if (a.x() == spec.Lx && b.x() == spec.Lx)
      s = Right;
    else if (a.y() == spec.Ly && b.y() == spec.Ly)
      s = Top;
    else if (a.x() == 0.0 && b.x() == 0.0)
      s = Left;
    else
      s = side_of(spec, um);
    fill_side(spec, s, a, b, h, outer);
  }
  if (!closed) outer.push_back(fixed.back());

  detail::Cdt cdt;
  cdt.init(Vec2(0.0, 0.0), Vec2(spec.Lx, spec.Ly), n_wet + static_cast<int>(outer.size()));
  std::vector<int> wet_id(n_wet);
  for (int i = 0; i < n_wet; ++i) wet_id[i] = cdt.add_point(wet[i]);
  std::vector<int> outer_id(outer.size());
  for (std::size_t k = 0; k < outer.size(); ++k)
    outer_id[k] = outer[k].wet_index >= 0 ? wet_id[outer[k].wet_index] : cdt.add_point(outer[k].p);

  for (int i = 0; i + 1 < n_wet; ++i) cdt.insert_segment(wet_id[i], wet_id[i + 1], BoundaryTag::Wet);
  if (closed) cdt.insert_segment(wet_id[n_wet - 1], wet_id[0], BoundaryTag::Wet);
  const std::size_t n_outer_segs = closed ? outer.size() : outer.size() - 1;
  for (std::size_t k = 0; k < n_outer_segs; ++k) {
    const Vec2 a = outer[k].p, b = outer[(k + 1) % outer.size()].p;
    const Vec2 mid = 0.5 * (a + b);
    Side s;
    if (a.y() == 0.0 && b.y() == 0.0)
      s = Bottom;
    else if (a.x() == spec.Lx && b.x() == spec.Lx)
      s = Right;
    else if (a.y() == spec.Ly && b.y() == spec.Ly)
      s = Top;
    else
      s = Left;
    cdt.insert_segment(outer_id[k], outer_id[(k + 1) % outer.size()], spec.tag_at(s, side_coord(s, mid)));
  }
  cdt.carve({{wet_id[0], wet_id[1]}});
  cdt.refine(h, sizing.refine_angle, sizing.max_steiner);
  FluidMesh m = cdt.extract(n_wet, closed, sizing.h_wet);

  ValidateOptions vo;
  vo.min_angle = sizing.min_angle;
  vo.min_angle_wet = sizing.min_angle_wet;
  const auto issues = validate(m, vo);
  if (!issues.empty()) {
    std::ostringstream msg;
    msg << "mesh validation failed: " << issues.front();
    if (issues.size() > 1) msg << " (+" << issues.size() - 1 << " more)";
    throw MeshError(msg.str());
  }
  for (int i = 0; i < n_wet; ++i)
    if (m.nodes[i] != wet[i]) throw MeshError("mesher moved a wet node");
  return m;
}

FluidMesh remesh(const DomainSpec& spec, const std::vector<Vec2>& wet, bool closed, const Sizing& sizing) {
  return triangulate(spec, wet, closed, sizing);
}

FluidMesh structured_rectangle(const DomainSpec& spec, int nx, int ny) {
  if (nx < 1 || ny < 1) throw ConfigError("structured mesh needs at least one cell per direction");
  FluidMesh m;
  auto id = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) m.nodes.emplace_back(spec.Lx * i / nx, spec.Ly * j / ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      m.tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  for (int i = 0; i < nx; ++i) {
    m.boundary.push_back({id(i, 0), id(i + 1, 0), spec.tag_at(Bottom, spec.Lx * (i + 0.5) / nx)});
    m.boundary.push_back({id(i + 1, ny), id(i, ny), spec.tag_at(Top, spec.Lx * (i + 0.5) / nx)});
  }
  for (int j = 0; j < ny; ++j) {
    m.boundary.push_back({id(nx, j), id(nx, j + 1), spec.tag_at(Right, spec.Ly * (j + 0.5) / ny)});
    m.boundary.push_back({id(0, j + 1), id(0, j), spec.tag_at(Left, spec.Ly * (j + 0.5) / ny)});
  }
  m.wet_closed = false;
  m.h_wet = std::max(spec.Lx / nx, spec.Ly / ny);
  return m;
}

std::vector<std::string> validate(const FluidMesh& mesh, const ValidateOptions& opts) {
  std::vector<std::string> issues;
  const int nt = mesh.n_tris();
  const int nn = mesh.n_nodes();
  std::map<std::pair<int, int>, int> edge_count;
  for (int t = 0; t < nt; ++t) {
    const auto& T = mesh.tris[t];
    bool ok = true;
    for (int k = 0; k < 3; ++k)
      if (T[k] < 0 || T[k] >= nn) ok = false;
    if (!ok) {
      issues.push_back("triangle " + std::to_string(t) + " has an invalid node index");
      continue;
    }
    if (!(orient2d(mesh.nodes[T[0]], mesh.nodes[T[1]], mesh.nodes[T[2]]) > 0))
      issues.push_back("triangle " + std::to_string(t) + " has non-positive area");
    for (int k = 0; k < 3; ++k) {
      const int a = T[k], b = T[(k + 1) % 3];
      ++edge_count[{std::min(a, b), std::max(a, b)}];
    }
  }
  std::map<std::pair<int, int>, int> tagged;
  for (const auto& e : mesh.boundary) ++tagged[{std::min(e.a, e.b), std::max(e.a, e.b)}];
  for (const auto& [e, c] : edge_count) {
    if (c > 2) issues.push_back("edge " + std::to_string(e.first) + "-" + std::to_string(e.second) + " is non-manifold");
    if (c == 1 && tagged.count(e) == 0)
      issues.push_back("boundary edge " + std::to_string(e.first) + "-" + std::to_string(e.second) + " has no tag");
  }
  for (const auto& [e, c] : tagged) {
    if (c != 1)
      issues.push_back("edge " + std::to_string(e.first) + "-" + std::to_string(e.second) + " carries several tags");
    const auto it = edge_count.find(e);
    if (it == edge_count.end() || it->second != 1)
      issues.push_back("tagged edge " + std::to_string(e.first) + "-" + std::to_string(e.second) +
                       " is not a boundary edge");
  }

  const int nw = static_cast<int>(mesh.wet_order.size());
  if (nw > 0) {
    std::map<std::pair<int, int>, BoundaryTag> directed;
    for (const auto& e : mesh.boundary) directed[{e.a, e.b}] = e.tag;
    const int nseg = mesh.wet_closed ? nw : nw - 1;
    for (int i = 0; i < nseg; ++i) {
      const int a = mesh.wet_order[i], b = mesh.wet_order[(i + 1) % nw];
      // Body on the left of the wet traversal, fluid on the left of b -> a.
      const auto it = directed.find({b, a});
      if (it == directed.end() || it->second != BoundaryTag::Wet)
        issues.push_back("wet segment " + std::to_string(i) + " is not a wet boundary edge");
    }
    if (mesh.wet_closed) {
      double area = 0.0;
      for (int i = 0; i < nw; ++i)
        area += cross(mesh.nodes[mesh.wet_order[i]], mesh.nodes[mesh.wet_order[(i + 1) % nw]]);
      if (!(area > 0.0)) issues.push_back("wet loop is not counterclockwise");
    }
  }

  if (opts.check_angles && issues.empty()) {
    std::vector<char> near1(nn, 0), near2(nn, 0);
    for (const int w : mesh.wet_order) near1[w] = 1;
    for (const auto& T : mesh.tris)
      if (near1[T[0]] || near1[T[1]] || near1[T[2]])
        for (int k = 0; k < 3; ++k) near2[T[k]] = 1;
    for (int t = 0; t < nt; ++t) {
      const auto& T = mesh.tris[t];
      const bool near = near2[T[0]] || near2[T[1]] || near2[T[2]];
      const double bound = near ? opts.min_angle_wet : opts.min_angle;
      const double ang = mesh.min_angle_deg(t);
      if (ang < bound) {
        std::ostringstream msg;
        const Vec2 c = (mesh.nodes[T[0]] + mesh.nodes[T[1]] + mesh.nodes[T[2]]) / 3.0;
        msg << "triangle " << t << " at (" << c.x() << ", " << c.y() << ") has minimum angle " << ang << " deg (bound "
            << bound << ")";
        issues.push_back(msg.str());
      }
    }
  }
  return issues;
}

}  // namespace rodfsi::mesh
