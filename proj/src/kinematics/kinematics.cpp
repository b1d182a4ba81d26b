#include "rodfsi/kinematics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <tuple>

namespace rodfsi::kin {

using std::numbers::pi;

double a_of(double b, KinematicMode mode) { return mode == KinematicMode::AEqualsOne ? 1.0 : 1.0 / b; }

double da_of(double b, KinematicMode mode) { return mode == KinematicMode::AEqualsOne ? 0.0 : -1.0 / (b * b); }

double BodyGeometry::thickness() const {
  return std::visit([](const auto& s) { return s.e; }, shape);
}

namespace {

// Relative slack used to decide that a point sits on the head.
constexpr double kHeadSlack = 1e-12;

// Piece counts are powers of two, so halving h exactly doubles them.
int pieces(double len, double h, int at_least) {
  const double n = std::max<double>(at_least, std::ceil(len / h - 1e-9));
  if (n > (1 << 24)) throw DomainError("wet spacing too small for the body");
  return static_cast<int>(std::bit_ceil(static_cast<unsigned>(n)));
}

// Appends points from a (inclusive) to b (exclusive) with spacing <= h.
void add_segment(std::vector<Vec2>& out, const Vec2& a, const Vec2& b, double h) {
  const int n = pieces((b - a).norm(), h, 1);
  for (int i = 0; i < n; ++i) out.push_back(a + (b - a) * (static_cast<double>(i) / n));
}

// Appends arc points from angle a0 (inclusive) to a1 (exclusive).
void add_arc(std::vector<Vec2>& out, const Vec2& c, double r, double a0, double a1, double h) {
  const int n = pieces(std::abs(a1 - a0) * r, h, 2);
  for (int i = 0; i < n; ++i) {
    const double a = a0 + (a1 - a0) * (static_cast<double>(i) / n);
    out.push_back(c + r * Vec2(std::cos(a), std::sin(a)));
  }
}

std::vector<Vec2> wet_points(const BodyGeometry& g, double h) {
  if (!(h > 0.0)) throw DomainError("wet spacing must be positive");
  std::vector<Vec2> pts;
  const double x0 = g.left.x(), y0 = g.left.y(), L = g.L_r;
  const double e = g.thickness();
  if (!(e > 0.0) || !(L > e)) throw DomainError("body thickness must be positive and smaller than its length");

  if (std::holds_alternative<FlatBoth>(g.shape)) {
    const Vec2 p0(x0, y0 - 0.5 * e), p1(x0 + L, y0 - 0.5 * e), p2(x0 + L, y0 + 0.5 * e), p3(x0, y0 + 0.5 * e);
    add_segment(pts, p0, p1, h);
    add_segment(pts, p1, p2, h);
    add_segment(pts, p2, p3, h);
    add_segment(pts, p3, p0, h);
  } else if (const auto* w = std::get_if<RoundedLeftWithHead>(&g.shape)) {
    const double Dc = w->beta_d * e, Hc = w->beta_h * e;
    if (!(w->beta_d > 1.0) || !(w->beta_h > 1.0)) throw DomainError("head factors must exceed 1");
    const double xh = x0 + L;
    const Vec2 c0(x0 + 0.5 * e, y0);
    add_segment(pts, Vec2(c0.x(), y0 - 0.5 * e), Vec2(xh, y0 - 0.5 * e), h);
    add_segment(pts, Vec2(xh, y0 - 0.5 * e), Vec2(xh, y0 - 0.5 * Hc), h);
    add_arc(pts, Vec2(xh + 0.5 * Dc, y0 - 0.5 * Hc), 0.5 * Dc, pi, 2.0 * pi, h);
    add_segment(pts, Vec2(xh + Dc, y0 - 0.5 * Hc), Vec2(xh + Dc, y0 + 0.5 * Hc), h);
    add_arc(pts, Vec2(xh + 0.5 * Dc, y0 + 0.5 * Hc), 0.5 * Dc, 0.0, pi, h);
    add_segment(pts, Vec2(xh, y0 + 0.5 * Hc), Vec2(xh, y0 + 0.5 * e), h);
    add_segment(pts, Vec2(xh, y0 + 0.5 * e), Vec2(c0.x(), y0 + 0.5 * e), h);
    add_arc(pts, c0, 0.5 * e, 0.5 * pi, 1.5 * pi, h);
  } else {
    const Vec2 c1(x0 + L - 0.5 * e, y0);
    add_segment(pts, Vec2(x0, y0 - 0.5 * e), Vec2(c1.x(), y0 - 0.5 * e), h);
    add_arc(pts, c1, 0.5 * e, -0.5 * pi, 0.5 * pi, h);
    add_segment(pts, Vec2(c1.x(), y0 + 0.5 * e), Vec2(x0, y0 + 0.5 * e), h);
    pts.emplace_back(x0, y0 + 0.5 * e);
  }
  return pts;
}

}  // namespace

double sigma_of_Y(const Vec2& Y, const BodyGeometry& geom) {
  const double d = Y.x() - geom.left.x();
  if (d >= geom.L_r * (1.0 - kHeadSlack)) return geom.S;
  return std::clamp(geom.S / geom.L_r * d, 0.0, geom.S);
}

std::pair<double, double> thetas(const Vec2& Y, const BodyGeometry& geom) {
  const double t2 = Y.y() - geom.left.y();
  if (sigma_of_Y(Y, geom) < geom.S || !std::holds_alternative<RoundedLeftWithHead>(geom.shape)) return {0.0, t2};
  return {Y.x() - geom.left.x() - geom.L_r, t2};
}

MaterialRecord make_record(const Vec2& Y, const BodyGeometry& geom, int index) {
  MaterialRecord r;
  r.Y = Y;
  r.s = sigma_of_Y(Y, geom);
  std::tie(r.theta1, r.theta2) = thetas(Y, geom);
  r.index = index;
  return r;
}

std::vector<MaterialRecord> build_wet_records(const BodyGeometry& geom, double h_wet) {
  const auto pts = wet_points(geom, h_wet);
  std::vector<MaterialRecord> recs;
  recs.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) recs.push_back(make_record(pts[i], geom, static_cast<int>(i)));
  return recs;
}

rod::RodConfig reference_rod(const BodyGeometry& geom, int n_el) {
  return rod::RodConfig::straight(n_el, geom.S, geom.left, geom.L_r);
}

Mat2 g_matrix(const Vec2& dm, KinematicMode mode) {
  const double b = dm.norm();
  if (!(b >= rod::kTangentGuard)) throw SingularConfiguration("g_matrix: degenerate tangent");
  const Vec2 t = dm / b;
  const Vec2 n = perp(t);
  const Mat2 P = Mat2::Identity() - t * t.transpose();
  return (da_of(b, mode) / b) * n * dm.transpose() + (a_of(b, mode) / b) * quarter_turn() * P;
}

Mat2 g_matrix(const rod::RodConfig& q, double s, KinematicMode mode) { return g_matrix(q.eval(s, 1), mode); }

Vec2 wet_position(const rod::RodConfig& q, const MaterialRecord& r, KinematicMode mode) {
  const rod::ShapeAt sa = rod::shape_at(q.n_el(), q.S(), r.s);
  const Vec2 m = sa.apply(q.dofs(), 0);
  const Vec2 dm = sa.apply(q.dofs(), 1);
  const double b = dm.norm();
  if (!(b >= rod::kTangentGuard)) throw SingularConfiguration("wet update: degenerate tangent");
  return m + r.theta1 * dm + r.theta2 * a_of(b, mode) * perp(dm) / b;
}

std::vector<Vec2> update_wet_positions(const rod::RodConfig& q, const std::vector<MaterialRecord>& records,
                                       KinematicMode mode) {
  std::vector<Vec2> y(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) y[i] = wet_position(q, records[i], mode);
  return y;
}

Vec2 induced_velocity(const rod::RodConfig& q, const MaterialRecord& r, const rod::RodConfig& p, KinematicMode mode) {
  const InducedStencil st = induced_stencil(q, r, mode);
  return st.W * p.dofs().segment<8>(4 * st.element);
}

InducedStencil induced_stencil(const rod::RodConfig& q, const MaterialRecord& r, KinematicMode mode) {
  const rod::ShapeAt sa = rod::shape_at(q.n_el(), q.S(), r.s);
  const Mat2 A = r.theta1 * Mat2::Identity() + r.theta2 * g_matrix(sa.apply(q.dofs(), 1), mode);
  InducedStencil st;
  st.element = sa.element;
  for (int j = 0; j < 8; ++j) {
    const int c = j % 2;
    Vec2 col = sa.weight(1, j) * A.col(c);
    col[c] += sa.weight(0, j);
    st.W.col(j) = col;
  }
  return st;
}

}  // namespace rodfsi::kin
