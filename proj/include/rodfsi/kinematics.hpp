#pragma once
//
// Material map between the rod centroid and the wet surface.
//
// Each wet node is attached to s_Y = sigma(Y) and carries (theta1, theta2)
// so that its current position is
//
//   y = q(s_Y) + theta1 q'(s_Y) + theta2 a(|q'|) J q'(s_Y)/|q'(s_Y)|.
//
#include "rodfsi/common.hpp"
#include "rodfsi/rod.hpp"

#include <variant>
#include <vector>

namespace rodfsi::kin {

enum class KinematicMode { AEqualsOne, AEqualsInverseNorm };

double a_of(double b, KinematicMode mode);
double da_of(double b, KinematicMode mode);

// Rectangle of thickness e with flat ends.
struct FlatBoth {
  double e = 0.03;
  bool operator==(const FlatBoth&) const = default;
};
// Half-disk tip of diameter e at s = 0, stadium head at s = S of width
// beta_d*e and straight height beta_h*e, capped by half-disks.
struct RoundedLeftWithHead {
  double e = 0.03;
  double beta_d = 3.0;
  double beta_h = 3.0;
  bool operator==(const RoundedLeftWithHead&) const = default;
};
// Flat end attached to a wall at s = 0, half-disk tip at s = S.
// The wet surface is an open chain whose endpoints lie on the wall.
struct ClampedRoundedRight {
  double e = 0.03;
  bool operator==(const ClampedRoundedRight&) const = default;
};

using BodyShape = std::variant<FlatBoth, RoundedLeftWithHead, ClampedRoundedRight>;

struct BodyGeometry {
  BodyShape shape = FlatBoth{};
  double L_r = 1.0;
  double S = 1.0;
  Vec2 left{1.0, 1.5};

  double thickness() const;
  bool closed() const { return !std::holds_alternative<ClampedRoundedRight>(shape); }
  bool operator==(const BodyGeometry&) const = default;
};

struct MaterialRecord {
  Vec2 Y = Vec2::Zero();
  double s = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
  int index = 0;
};

double sigma_of_Y(const Vec2& Y, const BodyGeometry& geom);
std::pair<double, double> thetas(const Vec2& Y, const BodyGeometry& geom);
MaterialRecord make_record(const Vec2& Y, const BodyGeometry& geom, int index);

// Wet surface of the reference body, body on the left of the traversal.
// Closed shapes start at the lower-left corner of the rod; the clamped
// shape starts on the wall below the rod and ends on the wall above it.
std::vector<MaterialRecord> build_wet_records(const BodyGeometry& geom, double h_wet);

// Straight reference rod matching the geometry.
rod::RodConfig reference_rod(const BodyGeometry& geom, int n_el);

// (a'(b)/b) n (x) m' + (a(b)/b) J (I - t (x) t).
Mat2 g_matrix(const Vec2& dm, KinematicMode mode);
Mat2 g_matrix(const rod::RodConfig& q, double s, KinematicMode mode);

Vec2 wet_position(const rod::RodConfig& q, const MaterialRecord& r, KinematicMode mode);
std::vector<Vec2> update_wet_positions(const rod::RodConfig& q, const std::vector<MaterialRecord>& records,
                                       KinematicMode mode);

Vec2 induced_velocity(const rod::RodConfig& q, const MaterialRecord& r, const rod::RodConfig& p, KinematicMode mode);

// Linear map from the 8 dofs of one element to the induced velocity at a record.
struct InducedStencil {
  int element = 0;
  Eigen::Matrix<double, 2, 8> W;
};
InducedStencil induced_stencil(const rod::RodConfig& q, const MaterialRecord& r, KinematicMode mode);

}  // namespace rodfsi::kin
