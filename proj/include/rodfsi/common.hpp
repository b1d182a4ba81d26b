#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace rodfsi {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Counterclockwise quarter turn.
inline Mat2 quarter_turn() {
  Mat2 J;
  J << 0.0, -1.0, 1.0, 0.0;
  return J;
}

inline Vec2 perp(const Vec2& v) { return {-v.y(), v.x()}; }

inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Error hierarchy. The CLI maps ConfigError to exit code 2 and every
// NumericalError to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// ||m'|| fell below the guard at some evaluation point.
class SingularConfiguration : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class MeshError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SolverError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// NaN/Inf showed up in the coupled solution.
class InstabilityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace rodfsi
