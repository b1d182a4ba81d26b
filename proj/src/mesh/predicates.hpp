#pragma once

#include "rodfsi/common.hpp"

namespace rodfsi::mesh::detail {

// Sign of the signed area of (a, b, c): +1 counterclockwise, -1 clockwise, 0 collinear.
int orient2d(const Vec2& a, const Vec2& b, const Vec2& c);

// +1 if d is strictly inside the circumcircle of the counterclockwise triangle (a, b, c).
int incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);

}  // namespace rodfsi::mesh::detail
