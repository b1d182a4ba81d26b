#include "predicates.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>

namespace rodfsi::mesh::detail {

namespace {

using boost::multiprecision::cpp_rational;

constexpr double kEps = 1.1102230246251565e-16;  // 2^-53
constexpr double kCcwBound = (3.0 + 16.0 * kEps) * kEps;
constexpr double kIccBound = (10.0 + 96.0 * kEps) * kEps;

int sign(const cpp_rational& x) { return x.sign(); }

int orient_exact(const Vec2& a, const Vec2& b, const Vec2& c) {
  const cpp_rational ax(a.x()), ay(a.y()), bx(b.x()), by(b.y()), cx(c.x()), cy(c.y());
  return sign((ax - cx) * (by - cy) - (ay - cy) * (bx - cx));
}

int incircle_exact(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const cpp_rational dx(d.x()), dy(d.y());
  const cpp_rational adx = cpp_rational(a.x()) - dx, ady = cpp_rational(a.y()) - dy;
  const cpp_rational bdx = cpp_rational(b.x()) - dx, bdy = cpp_rational(b.y()) - dy;
  const cpp_rational cdx = cpp_rational(c.x()) - dx, cdy = cpp_rational(c.y()) - dy;
  const cpp_rational alift = adx * adx + ady * ady;
  const cpp_rational blift = bdx * bdx + bdy * bdy;
  const cpp_rational clift = cdx * cdx + cdy * cdy;
  return sign(alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy) + clift * (adx * bdy - bdx * ady));
}

}  // namespace

int orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double detleft = (a.x() - c.x()) * (b.y() - c.y());
  const double detright = (a.y() - c.y()) * (b.x() - c.x());
  const double det = detleft - detright;
  const double detsum = std::abs(detleft) + std::abs(detright);
  if (std::abs(det) > kCcwBound * detsum) return det > 0.0 ? 1 : -1;
  return orient_exact(a, b, c);
}

int incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double adx = a.x() - d.x(), ady = a.y() - d.y();
  const double bdx = b.x() - d.x(), bdy = b.y() - d.y();
  const double cdx = c.x() - d.x(), cdy = c.y() - d.y();
  const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  const double cdxady = cdx * ady, adxcdy = adx * cdy;
  const double adxbdy = adx * bdy, bdxady = bdx * ady;
  const double alift = adx * adx + ady * ady;
  const double blift = bdx * bdx + bdy * bdy;
  const double clift = cdx * cdx + cdy * cdy;
  const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
  const double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift +
                           (std::abs(cdxady) + std::abs(adxcdy)) * blift + (std::abs(adxbdy) + std::abs(bdxady)) * clift;
  if (std::abs(det) > kIccBound * permanent) return det > 0.0 ? 1 : -1;
  return incircle_exact(a, b, c, d);
}

}  // namespace rodfsi::mesh::detail
