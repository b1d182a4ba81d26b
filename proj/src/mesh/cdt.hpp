#pragma once

#include "rodfsi/mesh.hpp"

#include <functional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace rodfsi::mesh::detail {

struct Tri {
  std::array<int, 3> v{};
  std::array<int, 3> n{-1, -1, -1};  // n[i] shares the edge opposite v[i]
  std::array<bool, 3> c{false, false, false};
  bool alive = true;
};

inline std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

inline std::uint64_t directed_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

// Incremental constrained Delaunay triangulation with Bowyer-Watson
// insertion and Ruppert-style refinement.
class Cdt {
 public:
  using SizeFn = std::function<double(const Vec2&)>;

  // Super triangle enclosing the box; its vertices get the next three ids.
  void init(const Vec2& lo, const Vec2& hi, int reserve_points);
  int add_point(const Vec2& p);
  void insert_segment(int a, int b, BoundaryTag tag);
  // Removes everything reachable from the super triangle, and everything
  // reachable from the left side of each directed hole edge, without
  // crossing constrained edges.
  void carve(const std::vector<std::pair<int, int>>& hole_edges);
  void refine(const SizeFn& size, double min_angle_deg, int max_steiner);
  FluidMesh extract(int n_wet, bool closed, double h_wet) const;

  const std::vector<Vec2>& points() const { return pts_; }

 private:
  struct Cavity {
    std::vector<int> tris;
    std::vector<std::pair<int, int>> edges;  // (triangle, local edge) on the cavity boundary
  };
  struct Walk {
    int tri = -1;          // triangle containing the target
    int blocked_tri = -1;  // set when a constrained edge or the domain boundary was hit
    int blocked_edge = -1;
  };

  Vec2 edge_a(int t, int i) const { return pts_[tris_[t].v[(i + 1) % 3]]; }
  Vec2 edge_b(int t, int i) const { return pts_[tris_[t].v[(i + 2) % 3]]; }
  int locate(const Vec2& p, int start) const;
  Walk walk(int start, const Vec2& from, const Vec2& to) const;
  bool build_cavity(const Vec2& p, int t0, std::uint64_t split_key, Cavity& cav);
  void commit(int vid, const Cavity& cav, std::uint64_t split_key);
  int find_edge(int a, int b) const;  // triangle holding directed edge a->b, or -1
  void rebuild_adjacency();
  void split_segment(int t, int i);
  bool try_insert(const Vec2& p, int t_start, const Vec2& from, std::vector<int>& created, int& encroached_t,
                  int& encroached_e);

  std::vector<Vec2> pts_;
  std::vector<Tri> tris_;
  std::vector<int> vtri_;
  std::unordered_map<std::uint64_t, BoundaryTag> segs_;
  std::vector<unsigned> mark_;
  unsigned stamp_ = 0;
  int super_ = -1;
  int hint_ = 0;
  std::vector<int> last_created_;
};

}  // namespace rodfsi::mesh::detail
