#include "rodfsi/fluid.hpp"

#include <cmath>
#include <string>

namespace rodfsi::fluid {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

void check_rheology(const Rheology& rh) {
  std::visit(overloaded{[](const Newtonian& n) {
                          if (!(n.mu > 0.0) || !std::isfinite(n.mu)) throw ConfigError("viscosity mu must be positive");
                        },
                        [](const CarreauYasuda& c) {
                          if (!(c.eta_inf > 0.0)) throw ConfigError("eta_inf must be positive");
                          if (!(c.eta0 > c.eta_inf)) throw ConfigError("eta0 must exceed eta_inf");
                          if (!(c.lambda > 0.0)) throw ConfigError("lambda must be positive");
                          if (!(c.r > 0.0)) throw ConfigError("power index r must be positive");
                        }},
             rh);
}

bool is_newtonian(const Rheology& rh) { return std::holds_alternative<Newtonian>(rh); }

double viscosity(const Rheology& rh, double g) {
  if (g < 0.0) throw DomainError("shear rate must be non-negative");
  return std::visit(overloaded{[](const Newtonian& n) { return n.mu; },
                               [g](const CarreauYasuda& c) {
                                 return c.eta_inf +
                                        (c.eta0 - c.eta_inf) * std::pow(1.0 + 2.0 * c.lambda * g * g, 0.5 * (c.r - 1.0));
                               }},
                    rh);
}

double viscosity_slope(const Rheology& rh, double g) {
  return std::visit(overloaded{[](const Newtonian&) { return 0.0; },
                               [g](const CarreauYasuda& c) {
                                 return (c.eta0 - c.eta_inf) * (c.r - 1.0) * c.lambda *
                                        std::pow(1.0 + 2.0 * c.lambda * g * g, 0.5 * (c.r - 3.0));
                               }},
                    rh);
}

InletProfile quartic_inlet(double e, double scale) {
  const double top = 0.5 * (3.0 - e);
  return [e, scale, top](const Vec2& x) {
    const double y = x.y();
    if (y < 0.0 || y > top) return Vec2(0.0, 0.0);
    return Vec2(scale * ((3.0 - e) * y * y * y - 2.0 * y * y * y * y), 0.0);
  };
}

}  // namespace rodfsi::fluid
