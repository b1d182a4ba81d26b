#pragma once

#include "rodfsi/rod.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace testutil {

using rodfsi::Vec2;
using rodfsi::rod::RodConfig;

inline RodConfig random_config(int n_el, double S, std::mt19937& rng, double amp = 0.2) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double a1 = amp * u(rng), a2 = amp * u(rng), ph = u(rng);
  RodConfig q = RodConfig::interpolate(
      n_el, S, [&](double s) { return Vec2(0.3 + 1.1 * s + a1 * std::sin(3.0 * s + ph), 1.5 + a2 * std::cos(2.0 * s)); },
      [&](double s) { return Vec2(1.1 + 3.0 * a1 * std::cos(3.0 * s + ph), -2.0 * a2 * std::sin(2.0 * s)); });
  for (int i = 0; i < q.n_dofs(); ++i) q.dofs()[i] += 0.02 * u(rng);
  return q;
}

inline RodConfig random_direction(int n_el, double S, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RodConfig p(n_el, S);
  for (int i = 0; i < p.n_dofs(); ++i) p.dofs()[i] = u(rng);
  return p;
}

// Largest slope of log(err) vs log(h) over consecutive pairs of the sweep,
// i.e. the order seen in the asymptotic regime before round-off dominates.
inline double observed_order(const std::function<double(double)>& err, const std::vector<double>& hs) {
  double best = -1e300;
  for (std::size_t i = 0; i + 1 < hs.size(); ++i) {
    const double e0 = err(hs[i]), e1 = err(hs[i + 1]);
    if (e0 <= 0.0 || e1 <= 0.0) continue;
    best = std::max(best, std::log(e0 / e1) / std::log(hs[i] / hs[i + 1]));
  }
  return best;
}

inline const std::vector<double> kSweep{1e-3, 1e-4, 1e-5, 1e-6};

}  // namespace testutil
