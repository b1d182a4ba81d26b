#include "cdt.hpp"

#include "predicates.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>

namespace rodfsi::mesh::detail {

namespace {

int local_index(const Tri& t, int v) {
  for (int k = 0; k < 3; ++k)
    if (t.v[k] == v) return k;
  return -1;
}

Vec2 circumcenter(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Vec2 ba = b - a, ca = c - a;
  const double d = 2.0 * cross(ba, ca);
  const double b2 = ba.squaredNorm(), c2 = ca.squaredNorm();
  return a + Vec2(ca.y() * b2 - ba.y() * c2, ba.x() * c2 - ca.x() * b2) / d;
}

}  // namespace

void Cdt::init(const Vec2& lo, const Vec2& hi, int reserve_points) {
  pts_.clear();
  tris_.clear();
  vtri_.clear();
  segs_.clear();
  pts_.reserve(reserve_points + 3);
  const Vec2 c = 0.5 * (lo + hi);
  const double D = std::max((hi - lo).maxCoeff(), 1.0);
  pts_.emplace_back(c.x() - 40.0 * D, c.y() - 40.0 * D);
  pts_.emplace_back(c.x() + 40.0 * D, c.y() - 40.0 * D);
  pts_.emplace_back(c.x(), c.y() + 40.0 * D);
  vtri_.assign(3, 0);
  Tri t;
  t.v = {0, 1, 2};
  tris_.push_back(t);
  super_ = 3;
  hint_ = 0;
}

int Cdt::locate(const Vec2& p, int start) const {
  int t = start;
  if (t < 0 || t >= static_cast<int>(tris_.size()) || !tris_[t].alive) {
    t = -1;
    for (int k = static_cast<int>(tris_.size()) - 1; k >= 0; --k)
      if (tris_[k].alive) {
        t = k;
        break;
      }
    if (t < 0) return -1;
  }
  const std::size_t max_steps = 4 * tris_.size() + 64;
  for (std::size_t step = 0; step < max_steps; ++step) {
    const Tri& T = tris_[t];
    bool inside = true;
    for (int j = 0; j < 3; ++j) {
      const int i = static_cast<int>((j + step) % 3);
      if (orient2d(edge_a(t, i), edge_b(t, i), p) < 0) {
        if (T.n[i] < 0) return -1;
        t = T.n[i];
        inside = false;
        break;
      }
    }
    if (inside) return t;
  }
  for (int k = 0; k < static_cast<int>(tris_.size()); ++k) {
    if (!tris_[k].alive) continue;
    bool inside = true;
    for (int i = 0; i < 3 && inside; ++i) inside = orient2d(edge_a(k, i), edge_b(k, i), p) >= 0;
    if (inside) return k;
  }
  return -1;
}

Cdt::Walk Cdt::walk(int start, const Vec2& from, const Vec2& to) const {
  Walk w;
  int t = start;
  const std::size_t max_steps = tris_.size() + 64;
  for (std::size_t step = 0; step < max_steps; ++step) {
    const Tri& T = tris_[t];
    int exit = -1, any_out = -1;
    for (int i = 0; i < 3; ++i) {
      const Vec2 a = edge_a(t, i), b = edge_b(t, i);
      if (orient2d(a, b, to) >= 0) continue;
      if (any_out < 0) any_out = i;
      if (orient2d(from, to, a) <= 0 && orient2d(from, to, b) >= 0) {
        exit = i;
        break;
      }
    }
    if (any_out < 0) {
      w.tri = t;
      return w;
    }
    if (exit < 0) exit = any_out;
    if (T.c[exit] || T.n[exit] < 0) {
      w.blocked_tri = t;
      w.blocked_edge = exit;
      return w;
    }
    t = T.n[exit];
  }
  return w;
}

bool Cdt::build_cavity(const Vec2& p, int t0, std::uint64_t split_key, Cavity& cav) {
  cav.tris.clear();
  cav.edges.clear();
  if (mark_.size() < tris_.size()) mark_.resize(tris_.size() * 2, 0);
  if (++stamp_ == 0) {
    std::fill(mark_.begin(), mark_.end(), 0);
    stamp_ = 1;
  }
  std::vector<int> stack{t0};
  mark_[t0] = stamp_;
  while (!stack.empty()) {
    const int t = stack.back();
    stack.pop_back();
    cav.tris.push_back(t);
    for (int i = 0; i < 3; ++i) {
      const int nb = tris_[t].n[i];
      if (nb >= 0 && mark_[nb] == stamp_) continue;
      if (tris_[t].c[i] || nb < 0) {
        cav.edges.emplace_back(t, i);
        continue;
      }
      const Tri& N = tris_[nb];
      if (incircle(pts_[N.v[0]], pts_[N.v[1]], pts_[N.v[2]], p) > 0) {
        mark_[nb] = stamp_;
        stack.push_back(nb);
      } else {
        cav.edges.emplace_back(t, i);
      }
    }
  }
  bool split_seen = split_key == 0;
  for (const auto& [t, i] : cav.edges) {
    const int a = tris_[t].v[(i + 1) % 3], b = tris_[t].v[(i + 2) % 3];
    if (split_key != 0 && edge_key(a, b) == split_key) {
      split_seen = true;
      continue;
    }
    if (orient2d(pts_[a], pts_[b], p) <= 0) return false;
  }
  return split_seen;
}

void Cdt::commit(int vid, const Cavity& cav, std::uint64_t split_key) {
  last_created_.clear();
  BoundaryTag split_tag = BoundaryTag::Wall;
  if (split_key != 0) {
    split_tag = segs_.at(split_key);
    segs_.erase(split_key);
  }
  // (directed key of the edge p->a, triangle) for the new triangles
  std::vector<std::pair<std::uint64_t, int>> spokes;
  for (const auto& [t, i] : cav.edges) {
    const int a = tris_[t].v[(i + 1) % 3], b = tris_[t].v[(i + 2) % 3];
    if (split_key != 0 && edge_key(a, b) == split_key) continue;
    Tri T;
    T.v = {a, b, vid};
    T.n = {-1, -1, tris_[t].n[i]};
    T.c = {false, false, tris_[t].c[i]};
    const int id = static_cast<int>(tris_.size());
    const int nb = T.n[2];
    tris_.push_back(T);
    if (nb >= 0) {
      Tri& N = tris_[nb];
      for (int k = 0; k < 3; ++k)
        if (N.v[(k + 1) % 3] == b && N.v[(k + 2) % 3] == a) N.n[k] = id;
    }
    spokes.emplace_back(directed_key(vid, a), id);
    last_created_.push_back(id);
  }
  for (const int id : last_created_) {
    Tri& T = tris_[id];
    const std::uint64_t twin = directed_key(vid, T.v[1]);  // edge b->p is matched by p->b
    int other = -1;
    for (const auto& [k, o] : spokes)
      if (k == twin) {
        other = o;
        break;
      }
    if (other >= 0) {
      T.n[0] = other;
      tris_[other].n[1] = id;
    } else {
      if (split_key == 0) throw MeshError("mesher: open cavity boundary during insertion");
      T.c[0] = true;
      segs_[edge_key(T.v[1], vid)] = split_tag;
    }
  }
  for (const int id : last_created_) {
    Tri& T = tris_[id];
    if (T.n[1] < 0 && !T.c[1]) {
      if (split_key == 0) throw MeshError("mesher: open cavity boundary during insertion");
      T.c[1] = true;
      segs_[edge_key(vid, T.v[0])] = split_tag;
    }
  }
  for (const int t : cav.tris) tris_[t].alive = false;
  if (static_cast<int>(vtri_.size()) <= vid) vtri_.resize(vid + 1, -1);
  for (const int id : last_created_)
    for (int k = 0; k < 3; ++k) vtri_[tris_[id].v[k]] = id;
  if (!last_created_.empty()) hint_ = last_created_.back();
}

int Cdt::add_point(const Vec2& p) {
  const int t = locate(p, hint_);
  if (t < 0) throw MeshError("mesher: input point outside the enclosing triangle");
  Cavity cav;
  if (!build_cavity(p, t, 0, cav)) throw MeshError("mesher: duplicate or degenerate input point");
  const int vid = static_cast<int>(pts_.size());
  pts_.push_back(p);
  commit(vid, cav, 0);
  return vid;
}

int Cdt::find_edge(int a, int b) const {
  const int t0 = a < static_cast<int>(vtri_.size()) ? vtri_[a] : -1;
  if (t0 >= 0 && tris_[t0].alive && local_index(tris_[t0], a) >= 0) {
    // Rotate one way, then the other if the fan is open.
    for (int dir = 0; dir < 2; ++dir) {
      int t = t0;
      for (int guard = 0; guard < 1000 && t >= 0; ++guard) {
        const Tri& T = tris_[t];
        const int k = local_index(T, a);
        if (T.v[(k + 1) % 3] == b) return t;
        t = dir == 0 ? T.n[(k + 2) % 3] : T.n[(k + 1) % 3];
        if (t == t0) break;
      }
      if (t == t0) break;
    }
    return -1;
  }
  for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
    if (!tris_[t].alive) continue;
    const int k = local_index(tris_[t], a);
    if (k >= 0 && tris_[t].v[(k + 1) % 3] == b) return t;
  }
  return -1;
}

void Cdt::rebuild_adjacency() {
  std::unordered_map<std::uint64_t, std::pair<int, int>> half;
  half.reserve(tris_.size() * 2);
  for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
    if (!tris_[t].alive) continue;
    for (int i = 0; i < 3; ++i) half[directed_key(tris_[t].v[(i + 1) % 3], tris_[t].v[(i + 2) % 3])] = {t, i};
  }
  for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
    Tri& T = tris_[t];
    if (!T.alive) continue;
    for (int i = 0; i < 3; ++i) {
      const int a = T.v[(i + 1) % 3], b = T.v[(i + 2) % 3];
      const auto it = half.find(directed_key(b, a));
      T.n[i] = it == half.end() ? -1 : it->second.first;
      T.c[i] = segs_.count(edge_key(a, b)) > 0;
    }
    for (int k = 0; k < 3; ++k) vtri_[T.v[k]] = t;
  }
}

void Cdt::insert_segment(int a, int b, BoundaryTag tag) {
  if (a == b) throw MeshError("mesher: degenerate segment");
  segs_[edge_key(a, b)] = tag;
  int t = find_edge(a, b);
  int i = t >= 0 ? (local_index(tris_[t], a) + 2) % 3 : -1;
  if (t < 0) {
    t = find_edge(b, a);
    if (t >= 0) i = (local_index(tris_[t], b) + 2) % 3;
  }
  if (t >= 0) {
    tris_[t].c[i] = true;
    const int nb = tris_[t].n[i];
    if (nb >= 0)
      for (int k = 0; k < 3; ++k)
        if (tris_[nb].n[k] == t) tris_[nb].c[k] = true;
    return;
  }

  // Segment recovery: remove the triangles crossed by a-b and retriangulate
  // the two pseudo-polygons on either side.
  const Vec2 pa = pts_[a], pb = pts_[b];
  int start = -1, x = -1, y = -1;
  for (int k = 0; k < static_cast<int>(tris_.size()) && start < 0; ++k) {
    const Tri& T = tris_[k];
    if (!T.alive) continue;
    const int la = local_index(T, a);
    if (la < 0) continue;
    const int vx = T.v[(la + 1) % 3], vy = T.v[(la + 2) % 3];
    const int ox = orient2d(pa, pts_[vx], pb), oy = orient2d(pa, pts_[vy], pb);
    if ((ox == 0 && (pts_[vx] - pa).dot(pb - pa) > 0.0) || (oy == 0 && (pts_[vy] - pa).dot(pb - pa) > 0.0))
      throw MeshError("mesher: a boundary segment passes through a vertex");
    if (ox > 0 && oy < 0) {
      start = k;
      x = vx;
      y = vy;
    }
  }
  if (start < 0) throw MeshError("mesher: cannot start segment recovery");

  std::vector<int> crossed{start}, left{y}, right{x};
  int cur = start;
  for (int guard = 0;; ++guard) {
    if (guard > static_cast<int>(tris_.size())) throw MeshError("mesher: segment recovery did not terminate");
    const Tri& T = tris_[cur];
    int e = -1;
    for (int k = 0; k < 3; ++k)
      if (T.v[k] != x && T.v[k] != y) e = k;
    if (T.c[e]) throw MeshError("mesher: boundary segments intersect");
    const int nb = T.n[e];
    if (nb < 0) throw MeshError("mesher: segment recovery left the triangulation");
    crossed.push_back(nb);
    int z = -1;
    for (int k = 0; k < 3; ++k)
      if (tris_[nb].v[k] != x && tris_[nb].v[k] != y) z = tris_[nb].v[k];
    if (z == b) break;
    const int oz = orient2d(pa, pb, pts_[z]);
    if (oz == 0) throw MeshError("mesher: a boundary segment passes through a vertex");
    if (oz > 0) {
      left.push_back(z);
      y = z;
    } else {
      right.push_back(z);
      x = z;
    }
    cur = nb;
  }
  for (const int t : crossed) tris_[t].alive = false;

  std::function<void(int, int, std::vector<int>)> fill = [&](int u, int v, std::vector<int> P) {
    if (P.empty()) return;
    std::size_t ci = 0;
    for (std::size_t k = 1; k < P.size(); ++k)
      if (incircle(pts_[u], pts_[v], pts_[P[ci]], pts_[P[k]]) > 0) ci = k;
    const int c = P[ci];
    fill(u, c, std::vector<int>(P.begin(), P.begin() + ci));
    fill(c, v, std::vector<int>(P.begin() + ci + 1, P.end()));
    Tri T;
    T.v = {u, v, c};
    tris_.push_back(T);
  };
  fill(a, b, left);
  std::reverse(right.begin(), right.end());
  fill(b, a, right);
  rebuild_adjacency();
}

void Cdt::carve(const std::vector<std::pair<int, int>>& hole_edges) {
  std::vector<char> out(tris_.size(), 0);
  std::vector<int> stack;
  for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
    if (!tris_[t].alive) continue;
    const auto& v = tris_[t].v;
    if (v[0] < super_ || v[1] < super_ || v[2] < super_) {
      out[t] = 1;
      stack.push_back(t);
    }
  }
  for (const auto& [u, w] : hole_edges) {
    const int t = find_edge(u, w);
    if (t >= 0 && !out[t]) {
      out[t] = 1;
      stack.push_back(t);
    }
  }
  while (!stack.empty()) {
    const int t = stack.back();
    stack.pop_back();
    for (int i = 0; i < 3; ++i) {
      const int nb = tris_[t].n[i];
      if (tris_[t].c[i] || nb < 0 || out[nb] || !tris_[nb].alive) continue;
      out[nb] = 1;
      stack.push_back(nb);
    }
  }
  for (int t = 0; t < static_cast<int>(tris_.size()); ++t)
    if (out[t]) tris_[t].alive = false;
  std::fill(vtri_.begin(), vtri_.end(), -1);
  for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
    Tri& T = tris_[t];
    if (!T.alive) continue;
    for (int i = 0; i < 3; ++i)
      if (T.n[i] >= 0 && !tris_[T.n[i]].alive) T.n[i] = -1;
    for (int k = 0; k < 3; ++k) vtri_[T.v[k]] = t;
    hint_ = t;
  }
}

bool Cdt::try_insert(const Vec2& p, int t_start, const Vec2& from, std::vector<int>& created, int& encroached_t,
                     int& encroached_e) {
  encroached_t = encroached_e = -1;
  if (!std::isfinite(p.x()) || !std::isfinite(p.y())) return false;
  const Walk w = walk(t_start, from, p);
  if (w.tri < 0) {
    if (w.blocked_tri >= 0 && tris_[w.blocked_tri].c[w.blocked_edge]) {
      encroached_t = w.blocked_tri;
      encroached_e = w.blocked_edge;
    }
    return false;
  }
  Cavity cav;
  const bool valid = build_cavity(p, w.tri, 0, cav);
  for (const auto& [t, i] : cav.edges) {
    if (!tris_[t].c[i]) continue;
    const Vec2 a = edge_a(t, i), b = edge_b(t, i);
    // Diametral circle for outer segments, 120 degree lens for wet ones.
    const double lens = segs_.at(edge_key(tris_[t].v[(i + 1) % 3], tris_[t].v[(i + 2) % 3])) == BoundaryTag::Wet
                            ? -0.5 * (a - p).norm() * (b - p).norm()
                            : 0.0;
    if ((a - p).dot(b - p) < lens) {
      encroached_t = t;
      encroached_e = i;
      return false;
    }
  }
  if (!valid) return false;
  for (const auto& [t, i] : cav.edges)
    if ((edge_a(t, i) - p).squaredNorm() < 1e-24) return false;
  const int vid = static_cast<int>(pts_.size());
  pts_.push_back(p);
  commit(vid, cav, 0);
  created = last_created_;
  return true;
}

void Cdt::split_segment(int t, int i) {
  const int a = tris_[t].v[(i + 1) % 3], b = tris_[t].v[(i + 2) % 3];
  const Vec2 m = 0.5 * (pts_[a] + pts_[b]);
  Cavity cav;
  last_created_.clear();
  if (!build_cavity(m, t, edge_key(a, b), cav)) return;
  const int vid = static_cast<int>(pts_.size());
  pts_.push_back(m);
  commit(vid, cav, edge_key(a, b));
}

void Cdt::refine(const SizeFn& size, double min_angle_deg, int max_steiner) {
  const double sin_min = std::sin(min_angle_deg * std::numbers::pi / 180.0);
  const double sqrt3 = std::sqrt(3.0);
  std::deque<int> queue;
  for (int t = 0; t < static_cast<int>(tris_.size()); ++t)
    if (tris_[t].alive) queue.push_back(t);
  std::vector<char> skipped;
  std::unordered_set<std::uint64_t> apexed;
  int work = 0;
  std::vector<int> created;

  auto push_created = [&](const std::vector<int>& ids) {
    for (const int id : ids) queue.push_back(id);
  };

  while (!queue.empty()) {
    const int t = queue.front();
    queue.pop_front();
    if (!tris_[t].alive) continue;
    if (static_cast<int>(skipped.size()) <= t) skipped.resize(tris_.size() * 2, 0);
    if (skipped[t]) continue;
    const Tri& T = tris_[t];
    const Vec2 A = pts_[T.v[0]], B = pts_[T.v[1]], C = pts_[T.v[2]];
    const Vec2 cc = circumcenter(A, B, C);
    const double R = (cc - A).norm();
    const double lmin = std::min({(B - A).norm(), (C - B).norm(), (A - C).norm()});
    const Vec2 g = (A + B + C) / 3.0;
    const bool bad = lmin < 2.0 * R * sin_min || sqrt3 * R > size(g);
    if (!bad) continue;
    if (++work > max_steiner) throw MeshError("mesher: refinement exceeded its iteration cap");

    int et = -1, ee = -1;
    if (try_insert(cc, t, g, created, et, ee)) {
      push_created(created);
      continue;
    }
    if (et < 0) {
      skipped[t] = 1;
      continue;
    }
    const int sa = tris_[et].v[(ee + 1) % 3], sb = tris_[et].v[(ee + 2) % 3];
    const std::uint64_t key = edge_key(sa, sb);
    if (segs_.at(key) != BoundaryTag::Wet) {
      split_segment(et, ee);
      push_created(last_created_);
      queue.push_back(t);
      continue;
    }
    // Wet segments are never split: try the apex of the ideal triangle on it.
    if (!apexed.insert(key).second) {
      skipped[t] = 1;
      continue;
    }
    const Vec2 u = pts_[sa], w = pts_[sb];
    const Vec2 apex = 0.5 * (u + w) + perp(w - u) * (0.5 * sqrt3);
    const Vec2 from = (pts_[tris_[et].v[0]] + pts_[tris_[et].v[1]] + pts_[tris_[et].v[2]]) / 3.0;
    int et2 = -1, ee2 = -1;
    if (try_insert(apex, et, from, created, et2, ee2)) {
      push_created(created);
      queue.push_back(t);
      continue;
    }
    if (et2 >= 0 && segs_.at(edge_key(tris_[et2].v[(ee2 + 1) % 3], tris_[et2].v[(ee2 + 2) % 3])) != BoundaryTag::Wet) {
      split_segment(et2, ee2);
      push_created(last_created_);
      queue.push_back(t);
      continue;
    }
    skipped[t] = 1;
  }
}

FluidMesh Cdt::extract(int n_wet, bool closed, double h_wet) const {
  FluidMesh m;
  m.nodes.assign(pts_.begin() + super_, pts_.end());
  m.wet_closed = closed;
  m.h_wet = h_wet;
  for (const Tri& T : tris_) {
    if (!T.alive) continue;
    if (T.v[0] < super_ || T.v[1] < super_ || T.v[2] < super_)
      throw MeshError("mesher: triangle attached to the enclosing triangle survived carving");
    m.tris.push_back({T.v[0] - super_, T.v[1] - super_, T.v[2] - super_});
    for (int i = 0; i < 3; ++i) {
      if (T.n[i] >= 0) continue;
      const int a = T.v[(i + 1) % 3], b = T.v[(i + 2) % 3];
      const auto it = segs_.find(edge_key(a, b));
      if (it == segs_.end()) throw MeshError("mesher: unconstrained edge on the domain boundary");
      m.boundary.push_back({a - super_, b - super_, it->second});
    }
  }
  m.wet_order.resize(n_wet);
  for (int i = 0; i < n_wet; ++i) m.wet_order[i] = i;
  return m;
}

}  // namespace rodfsi::mesh::detail
