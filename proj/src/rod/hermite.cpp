#include "rodfsi/rod.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rodfsi::rod {

std::array<double, 4> hermite_basis(double xi, int order) {
  const double a = 1.0 - xi;
  const double b = 1.0 + xi;
  switch (order) {
    case 0:
      return {0.25 * (2.0 + xi) * a * a, 0.25 * b * a * a, 0.25 * (2.0 - xi) * b * b, -0.25 * a * b * b};
    case 1:
      return {0.75 * (xi * xi - 1.0), 0.25 * (3.0 * xi * xi - 2.0 * xi - 1.0), 0.75 * (1.0 - xi * xi),
              0.25 * (3.0 * xi * xi + 2.0 * xi - 1.0)};
    case 2:
      return {1.5 * xi, 0.5 * (3.0 * xi - 1.0), -1.5 * xi, 0.5 * (3.0 * xi + 1.0)};
    default:
      throw DomainError("hermite_basis: order must be 0, 1 or 2");
  }
}

GaussRule gauss_legendre(int n) {
  switch (n) {
    case 1:
      return {{0.0}, {2.0}};
    case 2: {
      const double x = 1.0 / std::sqrt(3.0);
      return {{-x, x}, {1.0, 1.0}};
    }
    case 3: {
      const double x = std::sqrt(0.6);
      return {{-x, 0.0, x}, {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0}};
    }
    case 4: {
      const double r = std::sqrt(6.0 / 5.0);
      const double x1 = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * r);
      const double x2 = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * r);
      const double w1 = (18.0 + std::sqrt(30.0)) / 36.0;
      const double w2 = (18.0 - std::sqrt(30.0)) / 36.0;
      return {{-x2, -x1, x1, x2}, {w2, w1, w1, w2}};
    }
    case 5: {
      const double r = 2.0 * std::sqrt(10.0 / 7.0);
      const double x1 = std::sqrt(5.0 - r) / 3.0;
      const double x2 = std::sqrt(5.0 + r) / 3.0;
      const double w0 = 128.0 / 225.0;
      const double w1 = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
      const double w2 = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
      return {{-x2, -x1, 0.0, x1, x2}, {w2, w1, w0, w1, w2}};
    }
    default:
      throw DomainError("gauss_legendre: supported point counts are 1..5");
  }
}

ShapeAt shape_at_local(int n_el, double S, int element, double xi) {
  const double H = S / n_el;
  ShapeAt sa;
  sa.element = element;
  double jac = 1.0;  // (2/H)^order
  for (int k = 0; k < 3; ++k) {
    const auto N = hermite_basis(xi, k);
    sa.w[k] = {jac * N[0], jac * 0.5 * H * N[1], jac * N[2], jac * 0.5 * H * N[3]};
    jac *= 2.0 / H;
  }
  return sa;
}

ShapeAt shape_at(int n_el, double S, double s) {
  if (!(s >= 0.0 && s <= S)) {
    std::ostringstream msg;
    msg << "rod coordinate s = " << s << " outside [0, " << S << "]";
    throw DomainError(msg.str());
  }
  const double H = S / n_el;
  int e = static_cast<int>(std::floor(s / H));
  if (e >= n_el) e = n_el - 1;
  const double xi = std::clamp(2.0 * (s - e * H) / H - 1.0, -1.0, 1.0);
  return shape_at_local(n_el, S, e, xi);
}

Vec2 ShapeAt::apply(const Eigen::VectorXd& dofs, int order) const {
  const auto& c = w[order];
  const int base = 4 * element;
  return c[0] * dofs.segment<2>(base) + c[1] * dofs.segment<2>(base + 2) + c[2] * dofs.segment<2>(base + 4) +
         c[3] * dofs.segment<2>(base + 6);
}

RodConfig::RodConfig(int n_el, double S) : n_el_(n_el), S_(S), dofs_(Eigen::VectorXd::Zero(4 * (n_el + 1))) {
  if (n_el < 1) throw DomainError("RodConfig: need at least one element");
  if (!(S > 0.0)) throw DomainError("RodConfig: parameter length must be positive");
}

RodConfig RodConfig::interpolate(int n_el, double S, const std::function<Vec2(double)>& m,
                                 const std::function<Vec2(double)>& dm) {
  RodConfig q(n_el, S);
  for (int i = 0; i <= n_el; ++i) {
    const double s = (i == n_el) ? S : i * q.H();
    q.set_node(i, m(s), dm(s));
  }
  return q;
}

RodConfig RodConfig::straight(int n_el, double S, const Vec2& origin, double length) {
  const double stretch = length / S;
  return interpolate(
      n_el, S, [&](double s) { return Vec2(origin + Vec2(stretch * s, 0.0)); },
      [&](double) { return Vec2(stretch, 0.0); });
}

void RodConfig::set_node(int node, const Vec2& m, const Vec2& dm) {
  dofs_.segment<2>(4 * node) = m;
  dofs_.segment<2>(4 * node + 2) = dm;
}

Vec2 RodConfig::eval(double s, int order) const {
  if (order < 0 || order > 2) throw DomainError("RodConfig::eval: order must be 0, 1 or 2");
  return shape_at(n_el_, S_, s).apply(dofs_, order);
}

RodConfig& RodConfig::operator+=(const RodConfig& o) {
  dofs_ += o.dofs_;
  return *this;
}

}  // namespace rodfsi::rod
