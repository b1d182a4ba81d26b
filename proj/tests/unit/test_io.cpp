#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rodfsi/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

using namespace rodfsi;
using namespace rodfsi::io;

namespace {

std::string tmp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "rodfsi_test_io";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  return {std::istreambuf_iterator<char>(f), {}};
}

ScenarioSpec tiny(const std::string& extra = "") {
  return parse_config("[scenario]\nname = halfcircle\n[mesh]\nh_wet = 0.05\n[scheme]\nadaptive = false\ndt = 0.05\n" +
                      extra);
}

struct Ran {
  std::optional<fsi::Simulation> sim;
  std::vector<fsi::DiagnosticsRecord> records;
};

Ran run(const ScenarioSpec& spec, int steps) {
  Ran r;
  r.sim.emplace(spec.problem(), spec.scheme);
  for (int k = 0; k < steps; ++k) r.records.push_back(r.sim->step());
  return r;
}

// Exact half circle of length S, traversed counter-clockwise from the left end.
rod::RodConfig half_circle(int n_el, double S, Vec2 left) {
  const double R = S / std::numbers::pi;
  const Vec2 c = left + Vec2(R, 0.0);
  return rod::RodConfig::interpolate(
      n_el, S,
      [&](double s) {
        const double th = std::numbers::pi + s / R;
        return Vec2(c.x() + R * std::cos(th), c.y() + R * std::sin(th));
      },
      [&](double s) {
        const double th = std::numbers::pi + s / R;
        return Vec2(-std::sin(th), std::cos(th));
      });
}

}  // namespace

TEST_CASE("config round trip") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    const ScenarioSpec a = preset(name);
    CHECK_NOTHROW(validate(a));
    const std::string text = serialize(a);
    const ScenarioSpec b = parse_config(text);
    CHECK(serialize(b) == text);
    CHECK(b.n_el == a.n_el);
    CHECK(b.law == a.law);
    CHECK(b.scheme.dt == a.scheme.dt);
    CHECK(b.sizing.h_wet == a.sizing.h_wet);
  }
  ScenarioSpec s = tiny();
  s.scheme.dt = 0.1 + 0.2;
  s.law.C_kappa = std::numbers::pi / 7.0;
  const ScenarioSpec back = parse_config(serialize(s));
  CHECK(back.scheme.dt == s.scheme.dt);
  CHECK(back.law.C_kappa == s.law.C_kappa);
}

TEST_CASE("numbers with a pi factor") {
  const auto kappa = [](const std::string& v) {
    const ScenarioSpec s = parse_config("[actuation]\ntype = constant\nkappa0 = " + v + "\n");
    return std::get<rod::ConstantActuation>(s.law.actuation).kappa0;
  };
  CHECK(kappa("pi") == std::numbers::pi);
  CHECK(kappa("-pi") == -std::numbers::pi);
  CHECK(kappa("4pi") == doctest::Approx(4.0 * std::numbers::pi).epsilon(1e-15));
  CHECK(kappa("-1.998pi") == doctest::Approx(-1.998 * std::numbers::pi).epsilon(1e-15));
  CHECK(kappa("2*pi") == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-15));
  CHECK(kappa("0.25") == 0.25);
  CHECK_THROWS_AS(kappa("pie"), ConfigError);
  CHECK_THROWS_AS(kappa("1.5x"), ConfigError);
}

TEST_CASE("config errors") {
  SUBCASE("misspelled key names the key and line") {
    try {
      parse_config("[rod]\nC_eps = 90\nC_kapa = 0.0225\n", "bad.cfg");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      const std::string what = e.what();
      CHECK(what.find("unknown key 'C_kapa'") != std::string::npos);
      CHECK(what.find("bad.cfg:3") != std::string::npos);
    }
  }
  CHECK_THROWS_AS(parse_config("[nope]\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[rod]\nn_el = 4\nn_el = 8\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[rod]\nn_el = four\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("n_el = 4\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[fluid]\nmodel = newtonian\neta0 = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[scenario]\nname = nonexistent\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[scheme]\nname = implicit\n"), ConfigError);

  SUBCASE("validation") {
    CHECK_THROWS_AS(validate(parse_config("[rod]\nC_kappa = -1\n")), ConfigError);
    CHECK_THROWS_AS(validate(parse_config("[scheme]\ndt = 0\n")), ConfigError);
    CHECK_THROWS_AS(validate(parse_config("[mesh]\nh_wet = -0.01\n")), ConfigError);
    CHECK_THROWS_AS(validate(parse_config("[fluid]\nmodel = carreau_yasuda\nr = -1\n")), ConfigError);
    CHECK_NOTHROW(validate(parse_config("[fluid]\nmodel = carreau_yasuda\nr = 1.15\n")));
  }
}

TEST_CASE("shipped configs") {
  const std::filesystem::path dir = RODFSI_SOURCE_DIR "/configs";
  int n = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() != ".cfg") continue;
    CAPTURE(e.path().string());
    CHECK_NOTHROW(validate(load_config(e.path().string())));
    ++n;
  }
  CHECK(n >= 5);

  const ScenarioSpec s = load_config((dir / "swimmer.cfg").string());
  const auto* w = std::get_if<rod::TravelingWaveActuation>(&s.law.actuation);
  REQUIRE(w != nullptr);
  CHECK(w->amplitude == 20.0);
  CHECK(w->wavenumber == doctest::Approx(4.0 * std::numbers::pi).epsilon(1e-15));
  CHECK(w->speed == 2.0);
  CHECK(s.n_el == 8);
  CHECK(s.sizing.h_wet == 0.01);
  CHECK(s.scheme.scheme == fsi::Scheme::SemiImplicit);
  CHECK(std::holds_alternative<kin::RoundedLeftWithHead>(s.geometry.shape));

  CHECK_THROWS_AS(load_config((dir / "missing.cfg").string()), ConfigError);
}

TEST_CASE("inlet schedule") {
  const ScenarioSpec s = preset("cantilever");
  REQUIRE(s.inlet.enabled);
  const fsi::Problem P = s.problem();
  REQUIRE(P.inlet);
  const Vec2 y(0.0, 0.5);
  CHECK(P.inlet(0.5 * s.inlet.t_open)(y).norm() == 0.0);
  CHECK(P.inlet(s.inlet.t_open + 1.0)(y).x() > 0.0);
}

TEST_CASE("vtk round trip") {
  const ScenarioSpec spec = tiny();
  Ran r = run(spec, 1);
  const mesh::FluidMesh& m = *r.sim->last_mesh();
  const fluid::FluidState& st = *r.sim->last_fluid();

  const std::string fp = tmp_path("fluid.vtk");
  write_vtk_fluid(fp, m, st);
  const VtkData d = read_vtk(fp);
  CHECK(d.dataset == "UNSTRUCTURED_GRID");
  REQUIRE(d.points.size() == m.nodes.size());
  REQUIRE(d.cells.size() == m.tris.size());
  for (std::size_t i = 0; i < m.nodes.size(); ++i) CHECK((d.points[i] - m.nodes[i]).norm() == 0.0);
  for (std::size_t t = 0; t < m.tris.size(); ++t)
    for (int k = 0; k < 3; ++k) CHECK(d.cells[t][k] == m.tris[t][k]);

  const auto& vel = d.point_data.at("velocity");
  const auto& p = d.point_data.at("pressure");
  const auto& mu = d.cell_data.at("viscosity");
  CHECK(vel.components == 3);
  double su = 0.0, su_ref = 0.0, sp = 0.0, sp_ref = 0.0;
  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    su += std::abs(vel.values[3 * i]) + std::abs(vel.values[3 * i + 1]);
    su_ref += std::abs(st.u[i].x()) + std::abs(st.u[i].y());
    sp += p.values[i];
    sp_ref += st.p[i];
  }
  CHECK(std::abs(su - su_ref) <= 1e-12 * std::max(1.0, su_ref));
  CHECK(std::abs(sp - sp_ref) <= 1e-12 * std::max(1.0, std::abs(sp_ref)));
  CHECK(su_ref > 0.0);
  for (const double v : mu.values) CHECK(v == 1.0);

  const std::string rp = tmp_path("rod.vtk");
  write_vtk_rod(rp, r.sim->config(), 4);
  const VtkData rd = read_vtk(rp);
  CHECK(rd.dataset == "POLYDATA");
  CHECK(rd.points.size() == static_cast<std::size_t>(4 * spec.n_el + 1));
  REQUIRE(rd.cells.size() == 1);
  CHECK(rd.cells[0].size() == rd.points.size());
  CHECK((rd.points.front() - r.sim->config().position(0)).norm() < 1e-15);
  CHECK((rd.points.back() - r.sim->config().position(spec.n_el)).norm() < 1e-15);
  CHECK_THROWS_AS(write_vtk_rod(rp, r.sim->config(), 0), DomainError);
  CHECK_THROWS_AS(read_vtk(tmp_path("does_not_exist.vtk")), DomainError);
}

TEST_CASE("carreau-yasuda cell viscosity stays between the plateaus") {
  const ScenarioSpec spec = tiny("[fluid]\nmodel = carreau_yasuda\nr = 0.7\n");
  const auto cy = std::get<fluid::CarreauYasuda>(spec.rheology);
  Ran r = run(spec, 1);
  const std::string fp = tmp_path("fluid_cy.vtk");
  write_vtk_fluid(fp, *r.sim->last_mesh(), *r.sim->last_fluid());
  const VtkData d = read_vtk(fp);
  const auto& mu = d.cell_data.at("viscosity").values;
  double lo = 1e300, hi = 0.0;
  for (const double v : mu) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(lo > cy.eta_inf);
  CHECK(hi <= cy.eta0);
  CHECK(lo < hi);
}

TEST_CASE("evol file") {
  const std::string path = tmp_path("evol_empty.txt");
  write_evol({}, path);
  CHECK(slurp(path) == "# t E visc pdiv S_term x1_left x2_left dt iters\n");
  CHECK(read_evol(path).empty());

  Ran r = run(tiny(), 2);
  const std::string p2 = tmp_path("evol.txt");
  write_evol(r.records, p2);
  const auto back = read_evol(p2);
  REQUIRE(back.size() == r.records.size());
  for (std::size_t k = 0; k < back.size(); ++k) {
    CHECK(back[k].t == r.records[k].t);
    CHECK(back[k].E == r.records[k].E);
    CHECK(back[k].visc == r.records[k].visc);
    CHECK(back[k].pdiv == r.records[k].pdiv);
    CHECK(back[k].S_term == r.records[k].S_term);
    CHECK(back[k].left == r.records[k].left);
    CHECK(back[k].dt == r.records[k].dt);
    CHECK(back[k].iterations == r.records[k].iterations);
  }

  std::ofstream(tmp_path("evol_bad.txt")) << "# header\n0 1 2\n";
  CHECK_THROWS_AS(read_evol(tmp_path("evol_bad.txt")), DomainError);
}

TEST_CASE("error measures on the exact half circle") {
  const ScenarioSpec spec = preset("halfcircle");
  const double S = kin::reference_rod(spec.geometry, 2).S();
  const double R = S / std::numbers::pi;
  std::vector<double> ek, ep;
  for (const int n : {2, 4, 8, 16}) {
    const rod::RodConfig q = half_circle(n, S, Vec2(1.0, 1.0));
    const rod::ReferenceConfig ref(kin::reference_rod(spec.geometry, n));
    ek.push_back(curvature_error(q, ref, spec.law, 0.0).l2);
    ep.push_back(position_error(q, R));
  }
  for (std::size_t k = 0; k + 1 < ek.size(); ++k) {
    CAPTURE(k);
    CHECK(ek[k + 1] < ek[k]);
    CHECK(ep[k + 1] < ep[k]);
    CHECK(std::log2(ek[k] / ek[k + 1]) == doctest::Approx(2.0).epsilon(0.15));
    CHECK(std::log2(ep[k] / ep[k + 1]) == doctest::Approx(4.0).epsilon(0.15));
  }
  CHECK(ek.back() < 1e-2);
  CHECK(ep.back() < 1e-6);

  const rod::RodConfig q = half_circle(4, S, Vec2(1.0, 1.0));
  const CurvatureError c = curvature_error(q, rod::ReferenceConfig(kin::reference_rod(spec.geometry, 4)), spec.law, 0.0);
  CHECK(c.squared == doctest::Approx(c.l2 * c.l2 * c.l2 * c.l2).epsilon(1e-12));
}

TEST_CASE("energy error shrinks with the step") {
  std::vector<double> err;
  for (const char* dt : {"0.02", "0.01", "0.005"}) {
    ScenarioSpec s = tiny();
    s.scheme.dt = std::stod(dt);
    const fsi::Simulation fresh(s.problem(), s.scheme);
    const int steps = static_cast<int>(std::lround(0.1 / s.scheme.dt));
    Ran r = run(s, steps);
    const double e = energy_error(r.records, fresh.energy(), 0.0, 0.1);
    const auto b = fsi::energy_balance(r.records, fresh.energy(), 0.0, 0.1);
    CHECK(e == doctest::Approx(b.error()));
    CHECK(b.dE < 0.0);
    err.push_back(e);
  }
  CHECK(err[0] / err[1] > 1.6);
  CHECK(err[1] / err[2] > 1.6);
}
