// Serial vs threaded fluid kernels on structured meshes of increasing size.
#include "rodfsi/fluid.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <map>
#include <memory>

using namespace rodfsi;

namespace {

struct Fixture {
  mesh::FluidMesh mesh;
  fluid::ElementGeometry geom;
  std::vector<Vec2> u;
  std::vector<double> mu;
  fluid::FluidState state;

  explicit Fixture(int n)
      : mesh(mesh::structured_rectangle(mesh::DomainSpec::rectangle(3.0, 3.0, mesh::BoundaryTag::Wall,
                                                                    mesh::BoundaryTag::Wall, mesh::BoundaryTag::Wall,
                                                                    mesh::BoundaryTag::Wall),
                                        n, n)),
        geom(mesh) {
    for (const Vec2& x : mesh.nodes) u.emplace_back(std::sin(x.x()) * std::cos(x.y()), -std::cos(x.x()) * std::sin(x.y()));
    mu.assign(mesh.n_tris(), 1.0);
    state.u = u;
    state.p.assign(mesh.n_nodes(), 0.0);
    for (int i = 0; i < mesh.n_nodes(); ++i) state.p[i] = mesh.nodes[i].x() - 1.5;
    state.mu_cell = mu;
  }
};

const Fixture& fixture(int n) {
  static std::map<int, std::unique_ptr<Fixture>> cache;
  auto& f = cache[n];
  if (!f) f = std::make_unique<Fixture>(n);
  return *f;
}

void BM_ViscousSerial(benchmark::State& st) {
  const Fixture& f = fixture(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(fluid::viscous_reactions_serial(f.mesh, f.geom, f.u, f.mu));
  st.counters["tris"] = f.mesh.n_tris();
}

void BM_ViscousParallel(benchmark::State& st) {
  const Fixture& f = fixture(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(fluid::viscous_reactions_parallel(f.mesh, f.geom, f.u, f.mu));
  st.counters["tris"] = f.mesh.n_tris();
}

void BM_NodalReactions(benchmark::State& st) {
  const Fixture& f = fixture(static_cast<int>(st.range(0)));
  const bool parallel = st.range(1) != 0;
  for (auto _ : st) benchmark::DoNotOptimize(fluid::nodal_reactions(f.mesh, f.state, parallel));
  st.SetLabel(parallel ? "parallel" : "serial");
}

// Channel flow: parabolic inlet on the left, open on the right.
void BM_Solve(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  static std::map<int, mesh::FluidMesh> meshes;
  if (!meshes.count(n))
    meshes.emplace(n, mesh::structured_rectangle(mesh::DomainSpec::rectangle(3.0, 3.0, mesh::BoundaryTag::Wall,
                                                                               mesh::BoundaryTag::Open,
                                                                               mesh::BoundaryTag::Wall,
                                                                               mesh::BoundaryTag::Inlet),
                                                 n, n));
  const mesh::FluidMesh& m = meshes.at(n);
  fluid::SolverOptions opts;
  opts.parallel = st.range(1) != 0;
  const bool cy = st.range(2) != 0;
  const fluid::Rheology rh = cy ? fluid::Rheology(fluid::CarreauYasuda{}) : fluid::Rheology(fluid::Newtonian{1.0});
  fluid::BoundaryData bc;
  bc.inlet = [](const Vec2& x) { return Vec2(x.y() * (3.0 - x.y()), 0.0); };
  for (auto _ : st) benchmark::DoNotOptimize(fluid::solve_fluid(m, bc, rh, opts));
  st.SetLabel(std::string(opts.parallel ? "parallel" : "serial") + (cy ? " carreau-yasuda" : " newtonian"));
}

}  // namespace

BENCHMARK(BM_ViscousSerial)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_ViscousParallel)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_NodalReactions)->ArgsProduct({{128, 256}, {0, 1}})->Unit(benchmark::kMicrosecond)->UseRealTime();

BENCHMARK(BM_Solve)->ArgsProduct({{32, 64}, {0, 1}, {0, 1}})->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
