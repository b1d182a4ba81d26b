#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rodfsi/kinematics.hpp"
#include "rodfsi/mesh.hpp"

#include "../../src/mesh/predicates.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

using namespace rodfsi;
using namespace rodfsi::mesh;

namespace {

DomainSpec box() {
  return DomainSpec::rectangle(3.0, 3.0, BoundaryTag::Wall, BoundaryTag::Open, BoundaryTag::Wall, BoundaryTag::Open);
}

std::vector<Vec2> positions(const std::vector<kin::MaterialRecord>& recs) {
  std::vector<Vec2> p;
  for (const auto& r : recs) p.push_back(r.Y);
  return p;
}

kin::BodyGeometry flat_rod() {
  kin::BodyGeometry g;
  g.shape = kin::FlatBoth{0.03};
  g.left = Vec2(1.0, 1.5);
  return g;
}

kin::BodyGeometry swimmer_body() {
  kin::BodyGeometry g;
  g.shape = kin::RoundedLeftWithHead{0.03, 3.0, 3.0};
  g.left = Vec2(1.0, 1.5);
  return g;
}

Sizing sizing(double h) {
  Sizing s;
  s.h_wet = h;
  return s;
}

}  // namespace

TEST_CASE("exact predicates") {
  using detail::incircle;
  using detail::orient2d;
  CHECK(orient2d(Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)) == 1);
  CHECK(orient2d(Vec2(0, 0), Vec2(1, 0), Vec2(0, -1)) == -1);
  CHECK(orient2d(Vec2(0, 0), Vec2(1, 1), Vec2(3, 3)) == 0);
  // Nearly collinear points that defeat naive evaluation.
  const Vec2 a(0.5, 0.5), b(12.0, 12.0), c(24.0, 24.0);
  CHECK(orient2d(a, b, c) == 0);
  const Vec2 cp(24.0, std::nextafter(24.0, 25.0));
  CHECK(orient2d(a, b, cp) == 1);
  CHECK(incircle(Vec2(0, 0), Vec2(1, 0), Vec2(0, 1), Vec2(0.5, 0.5)) == 1);
  CHECK(incircle(Vec2(0, 0), Vec2(1, 0), Vec2(0, 1), Vec2(1, 1)) == 0);
  CHECK(incircle(Vec2(0, 0), Vec2(1, 0), Vec2(0, 1), Vec2(2, 2)) == -1);
}

TEST_CASE("structured rectangle") {
  const FluidMesh m = structured_rectangle(box(), 4, 4);
  CHECK(m.n_tris() == 32);
  CHECK(validate(m).empty());
  double area = 0.0;
  for (int t = 0; t < m.n_tris(); ++t) area += m.area(t);
  CHECK(area == doctest::Approx(9.0));
}

TEST_CASE("validate reports constructed failures") {
  FluidMesh m = structured_rectangle(box(), 2, 2);
  FluidMesh inverted = m;
  std::swap(inverted.tris[3][0], inverted.tris[3][1]);
  auto rep = validate(inverted);
  REQUIRE(!rep.empty());
  CHECK(rep.front().find("triangle 3") != std::string::npos);

  FluidMesh untagged = m;
  untagged.boundary.pop_back();
  rep = validate(untagged);
  REQUIRE(!rep.empty());
  CHECK(rep.front().find("no tag") != std::string::npos);
}

TEST_CASE("straight rod mesh") {
  const auto wet = positions(kin::build_wet_records(flat_rod(), 1.0 / 50));
  const auto t0 = std::chrono::steady_clock::now();
  const FluidMesh m = triangulate(box(), wet, true, sizing(1.0 / 50));
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  MESSAGE("h=1/50: " << m.n_tris() << " triangles, " << m.n_nodes() << " nodes, " << ms << " ms");
  CHECK(validate(m).empty());
  CHECK(m.n_tris() > 1500);
  CHECK(m.n_tris() < 6000);
  for (std::size_t i = 0; i < wet.size(); ++i) CHECK(m.nodes[i] == wet[i]);
  CHECK(m.count_wet_edges() == static_cast<int>(wet.size()));

  double area = 0.0;
  for (int t = 0; t < m.n_tris(); ++t) area += m.area(t);
  CHECK(area == doctest::Approx(9.0 - 0.03).epsilon(1e-12));

  // Wet-adjacent triangles have size close to h_wet.
  double max_edge = 0.0;
  for (const auto& T : m.tris)
    if (T[0] < static_cast<int>(wet.size()) || T[1] < static_cast<int>(wet.size()) ||
        T[2] < static_cast<int>(wet.size()))
      for (int k = 0; k < 3; ++k) max_edge = std::max(max_edge, (m.nodes[T[k]] - m.nodes[T[(k + 1) % 3]]).norm());
  CHECK(max_edge < 2.0 / 50);
}

TEST_CASE("mesh resolution scales with h_wet") {
  int prev_tris = 0, prev_wet = 0;
  for (double h : {1.0 / 50, 1.0 / 100, 1.0 / 200}) {
    const auto wet = positions(kin::build_wet_records(swimmer_body(), h));
    const auto t0 = std::chrono::steady_clock::now();
    const FluidMesh m = triangulate(box(), wet, true, sizing(h));
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    MESSAGE("swimmer h=" << h << ": " << m.n_tris() << " triangles, " << m.count_wet_edges() << " wet edges, " << ms
                         << " ms");
    CHECK(validate(m).empty());
    if (prev_wet > 0) {
      CHECK(m.count_wet_edges() >= 2 * prev_wet);
      CHECK(m.n_tris() > prev_tris);
    }
    prev_wet = m.count_wet_edges();
    prev_tris = m.n_tris();
  }
}

TEST_CASE("square without hole") {
  // A wet loop is required by triangulate; use a tiny square body far from the walls.
  const double h = 0.75;
  const std::vector<Vec2> wet{{1.4, 1.4}, {1.6, 1.4}, {1.6, 1.6}, {1.4, 1.6}};
  Sizing s = sizing(h);
  s.h_max = h;
  s.wall_clearance = 1.0;
  const FluidMesh m = triangulate(box(), wet, true, s);
  CHECK(validate(m).empty());
  CHECK(m.n_tris() > 8);
}

TEST_CASE("remesh is deterministic and preserves wet nodes") {
  const auto recs = kin::build_wet_records(swimmer_body(), 1.0 / 50);
  const rod::RodConfig ref = kin::reference_rod(swimmer_body(), 8);
  rod::RodConfig q = ref;
  for (int i = 0; i < q.n_nodes(); ++i) {
    const double s = i * q.H();
    q.set_node(i, ref.position(i) + Vec2(0.0, 0.05 * std::sin(2.0 * std::numbers::pi * s)),
               ref.tangent(i) + Vec2(0.0, 0.1 * std::numbers::pi * std::cos(2.0 * std::numbers::pi * s)));
  }
  const auto wet = kin::update_wet_positions(q, recs, kin::KinematicMode::AEqualsInverseNorm);
  const FluidMesh a = remesh(box(), wet, true, sizing(1.0 / 50));
  const FluidMesh b = remesh(box(), wet, true, sizing(1.0 / 50));
  CHECK(a.n_tris() == b.n_tris());
  CHECK(a.nodes == b.nodes);
  CHECK(a.tris == b.tris);
  for (std::size_t i = 0; i < wet.size(); ++i) {
    CHECK(a.nodes[i].x() == wet[i].x());
    CHECK(a.nodes[i].y() == wet[i].y());
  }
  CHECK(validate(a).empty());

  const FluidMesh c = remesh(box(), positions(recs), true, sizing(1.0 / 50));
  const FluidMesh d = remesh(box(), std::vector<Vec2>(c.nodes.begin(), c.nodes.begin() + recs.size()), true,
                             sizing(1.0 / 50));
  for (std::size_t i = 0; i < recs.size(); ++i) CHECK(d.nodes[i] == c.nodes[i]);
}

TEST_CASE("attached rod with an inlet") {
  kin::BodyGeometry g;
  g.shape = kin::ClampedRoundedRight{0.03};
  g.left = Vec2(0.0, 1.5);
  const auto wet = positions(kin::build_wet_records(g, 1.0 / 50));
  DomainSpec spec = box();
  spec.sides[Left] = {{(3.0 - 0.03) / 2, BoundaryTag::Inlet}, {3.0, BoundaryTag::Wall}};
  spec.sides[Top] = {{3.0, BoundaryTag::Outlet}};
  spec.sides[Right] = {{3.0, BoundaryTag::Wall}};
  const FluidMesh m = triangulate(spec, wet, false, sizing(1.0 / 50));
  CHECK(validate(m).empty());
  double area = 0.0;
  for (int t = 0; t < m.n_tris(); ++t) area += m.area(t);
  const double body = 0.03 * (1.0 - 0.015) + 0.5 * std::numbers::pi * 0.015 * 0.015;
  CHECK(area == doctest::Approx(9.0 - body).epsilon(1e-3));
  int inlet = 0, outlet = 0;
  for (const auto& e : m.boundary) {
    if (e.tag == BoundaryTag::Inlet) {
      ++inlet;
      CHECK(m.nodes[e.a].x() == 0.0);
      CHECK(std::max(m.nodes[e.a].y(), m.nodes[e.b].y()) <= 1.485 + 1e-15);
    }
    if (e.tag == BoundaryTag::Outlet) ++outlet;
  }
  CHECK(inlet > 0);
  CHECK(outlet > 0);
}

TEST_CASE("geometry failures are reported") {
  // Self-intersecting bow tie.
  const std::vector<Vec2> bow{{1.0, 1.0}, {2.0, 2.0}, {2.0, 1.0}, {1.0, 2.0}};
  CHECK_THROWS_AS(triangulate(box(), bow, true, sizing(0.05)), MeshError);
  // Too close to the wall.
  const std::vector<Vec2> near{{1.0, 0.01}, {2.0, 0.01}, {2.0, 0.2}, {1.0, 0.2}};
  CHECK_THROWS_AS(triangulate(box(), near, true, sizing(0.05)), MeshError);
  // Two faces almost touching.
  const std::vector<Vec2> pinch{{1.0, 1.0}, {2.0, 1.0}, {2.0, 1.5}, {1.5, 1.0005}, {1.0, 1.5}};
  CHECK_THROWS_AS(triangulate(box(), pinch, true, sizing(0.05)), MeshError);
}
