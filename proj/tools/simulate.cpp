// simulate <config> [--out DIR] [--until T] [--scheme S] [--dt X]
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.
#include "rodfsi/io.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>

using namespace rodfsi;

namespace {

std::string numbered(const std::filesystem::path& dir, const char* stem, int k) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%06d.vtk", stem, k);
  return (dir / buf).string();
}

void dump(const std::filesystem::path& dir, const std::string& tag, const fsi::Simulation& sim) {
  io::write_vtk_rod((dir / ("rod_" + tag + ".vtk")).string(), sim.config());
  if (sim.last_mesh() && sim.last_fluid())
    io::write_vtk_fluid((dir / ("fluid_" + tag + ".vtk")).string(), *sim.last_mesh(), *sim.last_fluid());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Planar Cosserat rod in an inertialess Stokes fluid"};
  std::string config, out = "out", scheme;
  std::optional<double> until, dt;
  bool quiet = false;
  app.add_option("config", config, "Scenario file")->required();
  app.add_option("--out", out, "Output directory")->capture_default_str();
  app.add_option("--until", until, "Final time (overrides output.t_end)");
  app.add_option("--scheme", scheme, "explicit, semi-implicit or pseudo-implicit");
  app.add_option("--dt", dt, "Time step (overrides scheme.dt and disables adaptivity)");
  app.add_flag("-q,--quiet", quiet, "No per-step progress");
  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  io::ScenarioSpec spec;
  try {
    spec = io::load_config(config);
    if (until) spec.output.t_end = *until;
    if (!scheme.empty()) spec.scheme.scheme = fsi::scheme_from_name(scheme);
    if (dt) {
      spec.scheme.dt = *dt;
      spec.scheme.adaptive = false;
    }
    io::validate(spec);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }

  const std::filesystem::path dir(out);
  std::optional<fsi::Simulation> sim;
  try {
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "config.cfg") << io::serialize(spec);
    sim.emplace(spec.problem(), spec.scheme);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }

  const auto t0 = std::chrono::steady_clock::now();
  int step = 0, frame = 0;
  try {
    io::EvolWriter evol((dir / "evol.txt").string());
    io::write_vtk_rod(numbered(dir, "rod", frame++), sim->config());
    sim->run_until(spec.output.t_end, [&](const fsi::DiagnosticsRecord& r) {
      evol.write(r);
      ++step;
      if (spec.output.vtk_every > 0 && step % spec.output.vtk_every == 0) {
        io::write_vtk_rod(numbered(dir, "rod", frame), sim->config());
        if (sim->last_mesh()) io::write_vtk_fluid(numbered(dir, "fluid", frame), *sim->last_mesh(), *sim->last_fluid());
        ++frame;
      }
      if (!quiet)
        std::printf("step %6d  t %.6g  dt %.3g  E %.6e  visc %.4e  iters %d  left (%.6f, %.6f)\n", step, r.t, r.dt, r.E,
                    r.visc, r.iterations, r.left.x(), r.left.y());
    });
    dump(dir, "final", *sim);
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure at t = %.9g after %d steps: %s\n", sim->time(), step, e.what());
    try {
      dump(dir, "failed", *sim);
    } catch (const std::exception&) {
    }
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error at t = %.9g: %s\n", sim->time(), e.what());
    return 3;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("done: %d steps to t = %.9g in %.1f s, output in %s\n", step, sim->time(), wall, dir.string().c_str());
  return 0;
}
