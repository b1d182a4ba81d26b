// Acceptance suite: one PASS/FAIL line per criterion, details indented above it.
//   acceptance [--only AC1,AC6,...]
#include "rodfsi/io.hpp"

#include "../unit/test_util.hpp"
#include "CLI11.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>

using namespace rodfsi;

namespace {

struct Verdict {
  bool pass = false;
  std::string summary;
};

void note(const char* fmt, auto... args) {
  std::printf("    ");
  std::printf(fmt, args...);
  std::printf("\n");
  std::fflush(stdout);
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

bool within(double v, double lo, double hi) { return v >= lo && v <= hi; }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------- AC1

Verdict ac1() {
  std::vector<double> H, ek, ep;
  bool steady = true;
  for (const int n : {2, 4, 8, 16}) {
    io::ScenarioSpec s = io::preset("halfcircle");
    s.n_el = n;
    s.sizing.h_wet = 0.01;
    s.scheme.scheme = fsi::Scheme::SemiImplicit;
    fsi::Simulation sim(s.problem(), s.scheme);
    // Steady once the rod velocity has decayed to round-off level.
    double T = 30.0;
    for (; T <= 300.0; T += 10.0) {
      sim.run_until(T);
      if (sim.last_velocity().lpNorm<Eigen::Infinity>() < 1e-8) break;
    }
    if (T > 300.0) steady = false;
    const double e_p = io::position_error(sim.config(), 1.0 / std::numbers::pi);
    const auto ce = io::curvature_error(sim.config(), sim.reference(), s.law, sim.time());
    note("N_el %2d  t %5.0f  |alpha| %.1e  e_kappa(L2) %.6e  e_kappa(squared) %.6e  e_p %.6e", n, sim.time(),
         sim.last_velocity().lpNorm<Eigen::Infinity>(), ce.l2, ce.squared, e_p);
    H.push_back(sim.config().S() / n);
    ek.push_back(ce.l2);
    ep.push_back(e_p);
  }
  const double sk = slope(H, ek), sp = slope(H, ep);
  return {steady && within(sk, 1.6, 2.4) && within(sp, 3.5, 4.5),
          fmt("slope e_kappa %.3f (want [1.6, 2.4]), slope e_p %.3f (want [3.5, 4.5])%s", sk, sp,
              steady ? "" : ", steady state not reached")};
}

// ---------------------------------------------------------------- AC2

Verdict ac2() {
  const std::vector<double> dts{0.04, 0.02, 0.01, 0.005, 0.0025};
  const std::vector<double> S_ref{0.003307, 0.001369, 0.000702, 0.000359, 0.000182};
  const std::vector<double> visc_ref{0.037543, 0.038663, 0.039334, 0.039705, 0.039905};
  const double t0 = 0.04, t1 = 0.8;
  std::vector<double> eE;
  bool S_ok = true, visc_ok = true;
  for (std::size_t k = 0; k < dts.size(); ++k) {
    io::ScenarioSpec s = io::preset("halfcircle");
    s.n_el = 4;
    s.sizing.h_wet = 0.01;
    s.scheme.scheme = fsi::Scheme::SemiImplicit;
    s.scheme.adaptive = false;
    s.scheme.dt = dts[k];
    fsi::Simulation sim(s.problem(), s.scheme);
    const double E0 = sim.energy();
    std::vector<fsi::DiagnosticsRecord> recs;
    sim.run_until(t1, [&](const fsi::DiagnosticsRecord& r) { recs.push_back(r); });
    const fsi::EnergyBalance b = fsi::energy_balance(recs, E0, t0, t1);
    eE.push_back(b.error());
    const double dS = b.S / S_ref[k] - 1.0, dv = b.visc / visc_ref[k] - 1.0;
    S_ok = S_ok && std::abs(dS) <= 0.30;
    visc_ok = visc_ok && std::abs(dv) <= 0.15;
    note("dt %-7g e_E %.6e  int S %.6e (%+.1f%%)  int visc %.6e (%+.1f%%)  int -pdiv %.3e  dE %.6e", dts[k], b.error(),
         b.S, 100 * dS, b.visc, 100 * dv, b.minus_pdiv, b.dE);
  }
  bool ratios_ok = true;
  std::string rs;
  for (std::size_t k = 0; k + 1 < eE.size(); ++k) {
    const double r = eE[k] / eE[k + 1];
    ratios_ok = ratios_ok && within(r, 1.6, 2.4);
    rs += fmt("%s%.3f", k ? ", " : "", r);
  }
  return {ratios_ok && S_ok && visc_ok,
          fmt("e_E ratios [%s] %s; S integrals %s (30%%); visc integrals %s (15%%)", rs.c_str(),
              ratios_ok ? "in [1.6, 2.4]" : "NOT all in [1.6, 2.4]", S_ok ? "within" : "NOT within",
              visc_ok ? "within" : "NOT within")};
}

// ---------------------------------------------------------------- AC3

struct MmsErrors {
  double h1 = 0.0;
  double l2p = 0.0;
};

// Poiseuille flow u = (y(1 - y), 0), p = -2 x + c on the unit square with
// the exact velocity on the whole boundary. Edge-midpoint quadrature is
// exact for the quadratic integrands.
MmsErrors poiseuille(int n) {
  using mesh::BoundaryTag;
  const auto spec =
      mesh::DomainSpec::rectangle(1.0, 1.0, BoundaryTag::Inlet, BoundaryTag::Inlet, BoundaryTag::Inlet, BoundaryTag::Inlet);
  const mesh::FluidMesh m = mesh::structured_rectangle(spec, n, n);
  fluid::BoundaryData bc;
  bc.inlet = [](const Vec2& x) { return Vec2(x.y() * (1.0 - x.y()), 0.0); };
  const fluid::FluidState s = fluid::solve_fluid(m, bc, fluid::Newtonian{1.0});
  const fluid::ElementGeometry g(m);
  double area = 0.0, pmean = 0.0;
  for (int t = 0; t < m.n_tris(); ++t) {
    double avg = 0.0;
    for (int a = 0; a < 3; ++a) avg += s.p[m.tris[t][a]] + 2.0 * m.nodes[m.tris[t][a]].x();
    pmean += g.area[t] * avg / 3.0;
    area += g.area[t];
  }
  pmean /= area;
  MmsErrors e;
  for (int t = 0; t < m.n_tris(); ++t) {
    const auto& T = m.tris[t];
    Mat2 L = Mat2::Zero();
    for (int a = 0; a < 3; ++a) L += s.u[T[a]] * g.grad[t][a].transpose();
    for (int k = 0; k < 3; ++k) {
      const Vec2 xm = 0.5 * (m.nodes[T[k]] + m.nodes[T[(k + 1) % 3]]);
      Mat2 Le = Mat2::Zero();
      Le(0, 1) = 1.0 - 2.0 * xm.y();
      e.h1 += g.area[t] / 3.0 * (L - Le).squaredNorm();
      const double d = 0.5 * (s.p[T[k]] + s.p[T[(k + 1) % 3]]) + 2.0 * xm.x() - pmean;
      e.l2p += g.area[t] / 3.0 * d * d;
    }
  }
  e.h1 = std::sqrt(e.h1);
  e.l2p = std::sqrt(e.l2p);
  return e;
}

Verdict ac3() {
  std::vector<MmsErrors> e;
  const std::vector<int> ns{8, 16, 32, 64};
  for (const int n : ns) {
    e.push_back(poiseuille(n));
    note("h 1/%-3d  |u - u_h|_H1 (semi-norm) %.6e  |p - p_h|_L2 %.6e", n, e.back().h1, e.back().l2p);
  }
  double ou = 1e300, op = 1e300;
  for (std::size_t k = 0; k + 1 < e.size(); ++k) {
    ou = std::min(ou, std::log2(e[k].h1 / e[k + 1].h1));
    op = std::min(op, std::log2(e[k].l2p / e[k + 1].l2p));
  }
  return {ou >= 0.9 && op >= 0.9, fmt("lowest observed order: velocity H1 %.3f, pressure L2 %.3f (want >= 0.9)", ou, op)};
}

// ---------------------------------------------------------------- AC4

io::ScenarioSpec swimmer(double h, double dt, fsi::Scheme scheme) {
  io::ScenarioSpec s = io::preset("swimmer");
  s.n_el = 8;
  s.sizing.h_wet = h;
  s.scheme.dt = dt;
  s.scheme.adaptive = false;
  s.scheme.scheme = scheme;
  return s;
}

double median(std::vector<double> v) {
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  return v[v.size() / 2];
}

Verdict ac4() {
  // Explicit: instability is a non-finite value or E above 1e3 times the
  // running median of its own history.
  bool unstable = false;
  std::string how = "no instability within 200 steps";
  {
    const io::ScenarioSpec s = swimmer(1.0 / 50, 1e-2, fsi::Scheme::Explicit);
    fsi::Simulation sim(s.problem(), s.scheme);
    std::vector<double> hist{sim.energy()};
    for (int k = 1; k <= 200 && !unstable; ++k) {
      try {
        const double E = sim.step().E;
        if (!std::isfinite(E)) {
          unstable = true;
          how = fmt("non-finite E at step %d", k);
        } else if (E > 1e3 * median(hist)) {
          unstable = true;
          how = fmt("E = %.3e > 1e3 x running median %.3e at step %d", E, median(hist), k);
        }
        hist.push_back(E);
      } catch (const InstabilityError& ex) {
        unstable = true;
        how = fmt("non-finite values at step %d (%s)", k, ex.what());
      } catch (const NumericalError& ex) {
        how = fmt("step %d failed before NaN or energy blow-up (%s); E history max %.3e, median %.3e", k, ex.what(),
                  *std::max_element(hist.begin(), hist.end()), median(hist));
        break;
      }
    }
    note("explicit: %s", how.c_str());
  }
  bool stable = false;
  std::string semi;
  {
    const io::ScenarioSpec s = swimmer(1.0 / 50, 1e-2, fsi::Scheme::SemiImplicit);
    fsi::Simulation sim(s.problem(), s.scheme);
    double Emax = sim.energy();
    int done = 0;
    try {
      for (; done < 200; ++done) Emax = std::max(Emax, sim.step().E);
      stable = std::isfinite(Emax);
      semi = fmt("200 steps, max E %.4e", Emax);
    } catch (const NumericalError& ex) {
      semi = fmt("failed at step %d: %s", done + 1, ex.what());
    }
    note("semi-implicit: %s", semi.c_str());
  }
  return {unstable && stable, fmt("explicit %s; semi-implicit %s", unstable ? "unstable" : "NOT flagged unstable",
                                  stable ? "completes 200 steps with bounded E" : "did NOT complete")};
}

// ---------------------------------------------------------------- AC5

Verdict ac5() {
  std::vector<std::vector<double>> x1(2);
  std::vector<double> times;
  const fsi::Scheme schemes[2] = {fsi::Scheme::Explicit, fsi::Scheme::SemiImplicit};
  double length = 1.0;
  for (int k = 0; k < 2; ++k) {
    const io::ScenarioSpec s = swimmer(1.0 / 50, 1e-3, schemes[k]);
    fsi::Simulation sim(s.problem(), s.scheme);
    length = sim.config().S();
    x1[k].push_back(sim.config().position(0).x());
    if (k == 0) times.push_back(0.0);
    try {
      sim.run_until(1.0, [&](const fsi::DiagnosticsRecord& r) {
        x1[k].push_back(r.left.x());
        if (k == 0) times.push_back(r.t);
      });
    } catch (const NumericalError& ex) {
      note("%s failed at t = %.4f: %s", fsi::scheme_name(schemes[k]), sim.time(), ex.what());
      return {false, fmt("%s run did not reach t = 1", fsi::scheme_name(schemes[k]))};
    }
    note("%s: x1(0) %.6f  x1(1) %.6f", fsi::scheme_name(schemes[k]), x1[k].front(), x1[k].back());
  }
  double worst = 0.0, at = 0.0;
  for (std::size_t i = 0; i < std::min(x1[0].size(), x1[1].size()); ++i) {
    const double d = std::abs(x1[0][i] - x1[1][i]);
    if (d > worst) worst = d, at = times[i];
  }
  return {worst <= 0.01 * length,
          fmt("max |x1_explicit - x1_semi| %.3e at t = %.3f (limit %.3e)", worst, at, 0.01 * length)};
}

// ---------------------------------------------------------------- AC6

struct Check {
  std::string name;
  bool ok;
  std::string detail;
};

rod::RodConfig transformed(const rod::RodConfig& q, double angle, const Vec2& c) {
  const Mat2 R = Eigen::Rotation2Dd(angle).toRotationMatrix();
  rod::RodConfig out = q;
  for (int i = 0; i <= q.n_el(); ++i) {
    out.dofs().segment<2>(4 * i) = R * q.position(i) + c;
    out.dofs().segment<2>(4 * i + 2) = R * q.tangent(i);
  }
  return out;
}

std::vector<Check> properties() {
  std::vector<Check> out;
  std::mt19937 rng(20261016);
  const int n = 6;
  const double S = 1.0;
  const rod::RodConfig q0 = testutil::random_config(n, S, rng);
  const rod::ReferenceConfig ref(testutil::random_config(n, S, rng, 0.05));
  rod::ElasticLaw law{90.0, 0.0225, rod::TravelingWaveActuation{20.0, 4.0 * std::numbers::pi, 2.0}};
  const double t = 0.13;

  {
    double worst = 0.0;
    const double E = rod::elastic_energy(q0, ref, law, t);
    for (const double a : {0.3, 1.7, -2.9})
      worst = std::max(worst, std::abs(rod::elastic_energy(transformed(q0, a, Vec2(0.7, -1.1)), ref, law, t) - E) / E);
    out.push_back({"objectivity of E", worst <= 1e-12, fmt("max relative change %.2e", worst)});
  }
  {
    rod::RodConfig tr(n, S), rot(n, S);
    const Vec2 c(0.4, -0.9);
    const Mat2 J = quarter_turn();
    for (int i = 0; i <= n; ++i) {
      tr.dofs().segment<2>(4 * i) = c;
      tr.dofs().segment<2>(4 * i + 2) = Vec2::Zero();
      rot.dofs().segment<2>(4 * i) = J * q0.position(i) + c;
      rot.dofs().segment<2>(4 * i + 2) = J * q0.tangent(i);
    }
    double worst = 0.0;
    for (int k = 0; k <= 40; ++k) {
      const double s = S * k / 40.0;
      for (const auto& d : {tr, rot}) {
        const rod::Strains v = rod::strain_variations(q0, s, d);
        worst = std::max({worst, std::abs(v.eps), std::abs(v.kappa)});
      }
    }
    out.push_back({"B null space (translations, J q + c)", worst <= 1e-12, fmt("max |B dq| %.2e", worst)});
  }
  const rod::RodConfig p = testutil::random_direction(n, S, rng);
  const rod::RodConfig d = testutil::random_direction(n, S, rng);
  const std::vector<double> hs{1e-2, 5e-3, 2.5e-3, 1.25e-3};
  {
    const double E = rod::elastic_energy(q0, ref, law, t);
    const double g = rod::energy_gradient(q0, ref, law, t, p);
    std::vector<double> err;
    for (const double h : hs) {
      rod::RodConfig qh = q0;
      qh.dofs() += h * p.dofs();
      err.push_back(std::abs(rod::elastic_energy(qh, ref, law, t) - E - h * g));
    }
    const double o = slope(hs, err);
    out.push_back({"gradient FD consistency", o >= 1.9, fmt("order %.3f", o)});
  }
  {
    const double g = rod::energy_gradient(q0, ref, law, t, d);
    const double second = rod::material_stiffness_form(q0, ref, law, p, d) +
                          rod::geometric_stiffness_action(q0, ref, law, t, p, d);
    std::vector<double> err;
    for (const double h : hs) {
      rod::RodConfig qh = q0;
      qh.dofs() += h * p.dofs();
      err.push_back(std::abs(rod::energy_gradient(qh, ref, law, t, d) - g - h * second));
    }
    const double o = slope(hs, err);
    out.push_back({"second variation FD consistency", o >= 1.9, fmt("order %.3f", o)});
  }
  {
    kin::BodyGeometry geom;
    geom.shape = kin::RoundedLeftWithHead{0.03, 3.0, 3.0};
    const auto recs = kin::build_wet_records(geom, 0.05);
    double o = 1e300;
    for (const auto mode : {kin::KinematicMode::AEqualsOne, kin::KinematicMode::AEqualsInverseNorm})
      for (std::size_t k = 0; k < recs.size(); k += 7) {
        const Vec2 x = kin::wet_position(q0, recs[k], mode);
        const Vec2 v = kin::induced_velocity(q0, recs[k], p, mode);
        std::vector<double> err;
        for (const double h : hs) {
          rod::RodConfig qh = q0;
          qh.dofs() += h * p.dofs();
          err.push_back((kin::wet_position(qh, recs[k], mode) - x - h * v).norm());
        }
        if (err.front() > 1e-13) o = std::min(o, slope(hs, err));
      }
    out.push_back({"induced velocity FD consistency", o >= 1.9, fmt("lowest order %.3f", o)});
  }

  // Coupled residual on a small Newtonian problem.
  fsi::Problem P;
  P.domain = mesh::DomainSpec::rectangle(3.0, 3.0, mesh::BoundaryTag::Wall, mesh::BoundaryTag::Open,
                                         mesh::BoundaryTag::Wall, mesh::BoundaryTag::Open);
  P.sizing.h_wet = 0.04;
  P.geometry.shape = kin::FlatBoth{0.03};
  P.n_el = 4;
  P.law = rod::ElasticLaw{90.0, 0.0225, rod::ConstantActuation{0.0, -std::numbers::pi}};
  const rod::ReferenceConfig ref_c(kin::reference_rod(P.geometry, P.n_el));
  const auto recs = kin::build_wet_records(P.geometry, P.sizing.h_wet);
  rod::RodConfig qc = kin::reference_rod(P.geometry, P.n_el);
  for (int i = 0; i <= P.n_el; ++i) qc.dofs().segment<2>(4 * i) = qc.position(i) + Vec2(0.0, 0.05 * std::sin(3.0 * i));
  {
    fsi::CoupledResidual R(P, ref_c, qc, 0.0, 0.02, fsi::Scheme::SemiImplicit, recs);
    std::normal_distribution<double> nd;
    Eigen::VectorXd a(R.n_free()), b(R.n_free());
    for (int i = 0; i < R.n_free(); ++i) a[i] = nd(rng), b[i] = nd(rng);
    const Eigen::VectorXd r0 = R(Eigen::VectorXd::Zero(R.n_free()));
    const Eigen::VectorXd ra = R(a), rb = R(b), rab = R(0.7 * a - 1.3 * b);
    const Eigen::VectorXd lin = r0 + 0.7 * (ra - r0) - 1.3 * (rb - r0);
    const double aff = (rab - lin).norm() / std::max({ra.norm(), rb.norm(), rab.norm()});
    out.push_back({"Newtonian residual affinity", R.affine() && aff <= 1e-9, fmt("relative defect %.2e", aff)});

    const Eigen::VectorXd pa = R.expand(a);
    const double Sform = pa.dot(R.stabilization() * pa);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (R.stabilization() + R.stabilization().transpose()));
    const double lmin = es.eigenvalues().minCoeff(), lmax = es.eigenvalues().cwiseAbs().maxCoeff();
    out.push_back({"S(q; p, p) >= 0", Sform >= 0.0 && lmin >= -1e-12 * lmax,
                   fmt("S(p, p) %.3e, smallest eigenvalue %.2e of %.2e", Sform, lmin, lmax)});

    const fluid::Dissipation dis = fluid::dissipation(*R.mesh(), *R.fluid_state());
    out.push_back({"visc >= 0", dis.visc >= 0.0, fmt("visc %.4e", dis.visc)});
  }
  {
    fsi::SchemeConfig direct, krylov;
    direct.linear_path = true;
    krylov.linear_path = false;
    double rel = 0.0;
    for (const auto sch : {fsi::Scheme::Explicit, fsi::Scheme::SemiImplicit}) {
      fsi::CoupledResidual R1(P, ref_c, qc, 0.0, 0.02, sch, recs), R2(P, ref_c, qc, 0.0, 0.02, sch, recs);
      fsi::StepStats s1, s2;
      const Eigen::VectorXd x1 = fsi::solve_step(R1, direct, Eigen::VectorXd::Zero(R1.n_free()), s1);
      const Eigen::VectorXd x2 = fsi::solve_step(R2, krylov, Eigen::VectorXd::Zero(R2.n_free()), s2);
      rel = std::max(rel, (x1 - x2).norm() / x1.norm());
    }
    out.push_back({"Newton-Krylov vs direct agreement", rel <= 1e-6, fmt("relative difference %.2e", rel)});
  }
  {
    const auto wet = kin::update_wet_positions(qc, recs, P.mode);
    const mesh::FluidMesh a = mesh::remesh(P.domain, wet, true, P.sizing);
    const mesh::FluidMesh b = mesh::remesh(P.domain, wet, true, P.sizing);
    bool exact = a.wet_order.size() == wet.size() && a.nodes == b.nodes && a.tris == b.tris;
    for (std::size_t k = 0; exact && k < wet.size(); ++k)
      exact = a.nodes[a.wet_order[k]].x() == wet[k].x() && a.nodes[a.wet_order[k]].y() == wet[k].y();
    out.push_back({"remesh wet-node bit exactness", exact, fmt("%zu wet nodes", wet.size())});
  }
  return out;
}

Verdict ac6() {
  bool all = true;
  int passed = 0;
  const auto checks = properties();
  for (const auto& c : checks) {
    note("%-40s %s  %s", c.name.c_str(), c.ok ? "ok  " : "FAIL", c.detail.c_str());
    all = all && c.ok;
    passed += c.ok;
  }
  return {all, fmt("%d of %zu properties hold", passed, checks.size())};
}

// ---------------------------------------------------------------- AC7

struct SwimResult {
  double dx = 0.0;
  bool monotone = false;
  bool ok = false;
};

SwimResult swim(const char* label, const fluid::Rheology& rh) {
  io::ScenarioSpec s = swimmer(1.0 / 100, 1e-2, fsi::Scheme::SemiImplicit);
  s.rheology = rh;
  const auto& w = std::get<rod::TravelingWaveActuation>(s.law.actuation);
  const double period = 2.0 * std::numbers::pi / (w.wavenumber * w.speed);
  fsi::Simulation sim(s.problem(), s.scheme);
  // The head is the s = S end.
  const int head = s.n_el;
  std::vector<double> t{0.0}, x{sim.config().position(head).x()};
  const double left0 = sim.config().position(0).x();
  SwimResult out;
  try {
    sim.run_until(2.0 * period, [&](const fsi::DiagnosticsRecord& r) {
      t.push_back(r.t);
      x.push_back(sim.config().position(head).x());
    });
  } catch (const NumericalError& ex) {
    note("%s: failed at t = %.4f: %s", label, sim.time(), ex.what());
    return out;
  }
  out.ok = true;
  out.dx = x.back() - x.front();
  // One-period moving average (trapezoidal), sampled at every step of the second period.
  const int per = static_cast<int>(std::lround(period / s.scheme.dt));
  std::vector<double> avg;
  for (std::size_t e = per; e < x.size(); ++e) {
    double a = 0.0;
    for (std::size_t i = e - per; i < e; ++i) a += 0.5 * (x[i] + x[i + 1]) * (t[i + 1] - t[i]);
    avg.push_back(a / (t[e] - t[e - per]));
  }
  const double sgn = out.dx >= 0.0 ? 1.0 : -1.0;
  out.monotone = avg.size() >= 2;
  for (std::size_t i = 1; i < avg.size(); ++i) out.monotone = out.monotone && sgn * (avg[i] - avg[i - 1]) >= 0.0;
  note("%-24s head dx1 %+.6e  left-end dx1 %+.6e  period average %.6f -> %.6f  %s", label, out.dx,
       sim.config().position(0).x() - left0, avg.front(), avg.back(), out.monotone ? "monotone" : "NOT monotone");
  return out;
}

Verdict ac7() {
  const SwimResult nw = swim("newtonian", fluid::Newtonian{1.0});
  const SwimResult thin = swim("shear-thinning r=0.7", fluid::CarreauYasuda{1.5, 1e-3, 1.0, 0.7});
  const SwimResult thick = swim("shear-thickening r=1.15", fluid::CarreauYasuda{1.5, 1e-3, 1.0, 1.15});
  bool ok = nw.ok && thin.ok && thick.ok;
  for (const SwimResult* r : {&nw, &thin, &thick}) ok = ok && r->monotone && std::abs(r->dx) > 0.01;
  ok = ok && std::abs(thin.dx) > std::abs(thick.dx);
  return {ok, fmt("|dx1| newtonian %.4f, thinning %.4f, thickening %.4f (want > 0.01, monotone, thinning > thickening)",
                  std::abs(nw.dx), std::abs(thin.dx), std::abs(thick.dx))};
}

// ---------------------------------------------------------------- smoke runs

Verdict smoke(io::ScenarioSpec s, double T) {
  fsi::Simulation sim(s.problem(), s.scheme);
  int steps = 0;
  try {
    sim.run_until(T, [&](const fsi::DiagnosticsRecord&) { ++steps; });
  } catch (const NumericalError& ex) {
    return {false, fmt("step failure at t = %.4f after %d steps: %s", sim.time(), steps, ex.what())};
  }
  return {true, fmt("%d steps to t = %g, E %.4e", steps, sim.time(), sim.energy())};
}

Verdict smoke_cantilever() {
  const io::ScenarioSpec s = io::preset("cantilever");
  return smoke(s, s.output.t_end);
}

Verdict smoke_swimmer_fine() {
  io::ScenarioSpec s = io::preset("swimmer");
  s.sizing.h_wet = 1.0 / 200;
  return smoke(s, 0.5);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite"};
  std::vector<std::string> only;
  app.add_option("--only", only, "Criteria to run (AC1..AC7, SMOKE-CANTILEVER, SMOKE-SWIMMER-FINE)")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Verdict()>>> all{
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5}, {"AC6", ac6}, {"AC7", ac7},
      {"SMOKE-CANTILEVER", smoke_cantilever}, {"SMOKE-SWIMMER-FINE", smoke_swimmer_fine}};
  const std::set<std::string> want(only.begin(), only.end());
  int failed = 0;
  for (const auto& [name, fn] : all) {
    if (!want.empty() && !want.count(name)) continue;
    std::printf("%s\n", name.c_str());
    std::fflush(stdout);
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& ex) {
      v = {false, std::string("exception: ") + ex.what()};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s: %s [%.0f s]\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.summary.c_str(), sec);
    std::fflush(stdout);
    failed += !v.pass;
  }
  return failed == 0 ? 0 : 1;
}
