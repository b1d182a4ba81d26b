#include "rodfsi/io.hpp"

#include <cmath>

namespace rodfsi::io {

namespace {

// Composite Gauss rule over the rod; f(s) evaluated at every point.
template <class F>
double integrate(const rod::RodConfig& q, int points, F&& f) {
  const rod::GaussRule g = rod::gauss_legendre(points);
  const double H = q.H();
  double sum = 0.0;
  for (int e = 0; e < q.n_el(); ++e)
    for (std::size_t k = 0; k < g.points.size(); ++k)
      sum += 0.5 * H * g.weights[k] * f((e + 0.5 * (g.points[k] + 1.0)) * H);
  return sum;
}

}  // namespace

CurvatureError curvature_error(const rod::RodConfig& q, const rod::ReferenceConfig& ref, const rod::ElasticLaw& law,
                               double t) {
  const double I = integrate(q, 5, [&](double s) {
    const double k = rod::strains(q, ref, law, s, t).kappa;
    return k * k;
  });
  return {std::sqrt(I), I * I};
}

double position_error(const rod::RodConfig& q, double radius) {
  const Vec2 rc = 0.5 * (q.position(0) + q.position(q.n_el()));
  // The integrand has kinks where |q - rc| crosses the radius; a denser
  // rule keeps the quadrature error below the discretization error.
  const rod::GaussRule g = rod::gauss_legendre(5);
  const int sub = 8;
  const double h = q.H() / sub;
  double sum = 0.0;
  for (int e = 0; e < q.n_el() * sub; ++e)
    for (std::size_t k = 0; k < g.points.size(); ++k) {
      const double s = (e + 0.5 * (g.points[k] + 1.0)) * h;
      sum += 0.5 * h * g.weights[k] * std::abs((q.eval(s, 0) - rc).norm() - radius);
    }
  return sum;
}

double energy_error(const std::vector<fsi::DiagnosticsRecord>& records, double E0, double t0, double t1) {
  return fsi::energy_balance(records, E0, t0, t1).error();
}

}  // namespace rodfsi::io
