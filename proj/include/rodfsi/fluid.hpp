#pragma once
// Stabilized P1-P1 Stokes solver with generalized Newtonian viscosity.

#include "rodfsi/common.hpp"
#include "rodfsi/mesh.hpp"

#include <Eigen/SparseCore>

#include <functional>
#include <memory>
#include <variant>
#include <vector>

namespace rodfsi::fluid {

struct Newtonian {
  double mu = 1.0;
};

// mu = eta_inf + (eta0 - eta_inf) (1 + 2 lambda g^2)^((r - 1) / 2)
struct CarreauYasuda {
  double eta0 = 1.5;
  double eta_inf = 1e-3;
  double lambda = 1.0;
  double r = 0.7;
};

using Rheology = std::variant<Newtonian, CarreauYasuda>;

void check_rheology(const Rheology& rh);
bool is_newtonian(const Rheology& rh);
double viscosity(const Rheology& rh, double gamma_dot);
// d mu / d (gamma_dot^2); finite at gamma_dot = 0.
double viscosity_slope(const Rheology& rh, double gamma_dot);

// Velocity prescribed on inlet edges, evaluated at node positions.
using InletProfile = std::function<Vec2(const Vec2&)>;

// u = ((3 - e) y^3 - 2 y^4, 0) for 0 <= y <= (3 - e) / 2, scaled by `scale`.
InletProfile quartic_inlet(double e, double scale = 1.0);

struct BoundaryData {
  std::vector<Vec2> wet;  // one velocity per wet node, in wet order
  InletProfile inlet;     // required when the mesh has inlet edges
};

struct SolverOptions {
  double tol = 1e-10;  // residual infinity norm
  int max_iter = 25;
  bool parallel = true;
};

struct FluidState {
  std::vector<Vec2> u;           // full nodal velocity, boundary values included
  std::vector<double> p;         // nodal pressure
  std::vector<double> mu_cell;   // per-triangle viscosity
  int newton_iterations = 0;
};

// Element kernels shared by the solver, the diagnostics and the benchmarks.
struct ElementGeometry {
  std::vector<double> area;
  std::vector<std::array<Vec2, 3>> grad;  // P1 basis gradients
  std::vector<double> h2;                 // squared longest edge

  explicit ElementGeometry(const mesh::FluidMesh& m);
};

// Symmetric velocity gradient, constant per triangle.
Mat2 strain_rate(const ElementGeometry& g, int t, const std::array<int, 3>& tri, const std::vector<Vec2>& u);
double shear_rate(const Mat2& eps);

// Solver bound to one mesh. The factorization is cached for Newtonian
// rheology, so repeated solves with new boundary data only back-substitute.
class StokesSolver {
 public:
  StokesSolver(const mesh::FluidMesh& mesh, Rheology rheology, SolverOptions opts = {});
  ~StokesSolver();
  StokesSolver(const StokesSolver&) = delete;
  StokesSolver& operator=(const StokesSolver&) = delete;

  // A guess on the same mesh seeds the interior velocity and the pressure.
  FluidState solve(const BoundaryData& bc, const FluidState* guess = nullptr);

  // Factorizes the Newton Jacobian at a solved state (no-op for Newtonian
  // rheology once factorized). Required before wet_reaction_sensitivity.
  void prepare_tangent(const FluidState& at);
  // Linearized change of the nodal reactions at the wet nodes (wet order)
  // for a change dwet of the wet velocities, at the prepared state.
  std::vector<Vec2> wet_reaction_sensitivity(const FluidState& at, const std::vector<Vec2>& dwet) const;

  const mesh::FluidMesh& mesh() const { return mesh_; }
  const Rheology& rheology() const { return rheology_; }
  const ElementGeometry& geometry() const { return geom_; }
  bool pressure_pinned() const { return pinned_ >= 0; }
  int n_unknowns() const { return n_free_; }
  // Nodes whose velocity is prescribed (wet, wall, inlet).
  const std::vector<char>& dirichlet() const { return dirichlet_; }

  // Residual of the free rows at (u, p), using viscosity mu_cell.
  Eigen::VectorXd residual(const std::vector<Vec2>& u, const std::vector<double>& p) const;

 private:
  struct Impl;
  void build_dofs();
  void build_pattern();
  std::vector<Vec2> lift(const BoundaryData& bc) const;
  void assemble(const std::vector<Vec2>& u, const std::vector<double>& p, bool newton);
  void factorize();
  Eigen::VectorXd solve_linear(const Eigen::VectorXd& rhs) const;
  void scatter(const Eigen::VectorXd& x, std::vector<Vec2>& u, std::vector<double>& p, double step) const;
  void update_viscosity(const std::vector<Vec2>& u);
  Eigen::VectorXd residual_with(const std::vector<Vec2>& u, const std::vector<double>& p,
                                const std::vector<double>& mu) const;

  const mesh::FluidMesh& mesh_;
  Rheology rheology_;
  SolverOptions opts_;
  ElementGeometry geom_;
  std::vector<char> dirichlet_;
  std::vector<int> vdof_;  // 2 per node, -1 when prescribed
  std::vector<int> pdof_;  // 1 per node, -1 when pinned
  int pinned_ = -1;
  int n_free_ = 0;
  std::vector<double> mu_;
  std::vector<int> wet_tris_;  // triangles touching a wet node
  std::vector<int> wet_slot_;  // node -> position in wet order, or -1
  std::unique_ptr<Impl> impl_;
};

FluidState solve_fluid(const mesh::FluidMesh& mesh, const BoundaryData& bc, const Rheology& rheology,
                       const SolverOptions& opts = {});

// Momentum residual at every node, including prescribed ones:
// r_a = int 2 mu eps(u) : eps(phi_a e_c) - p div(phi_a e_c).
std::vector<Vec2> nodal_reactions(const mesh::FluidMesh& mesh, const FluidState& state, bool parallel = true);

// int 2 mu eps(u) : eps(w) - p div w, exact for nodal P1 fields.
double virtual_work(const mesh::FluidMesh& mesh, const FluidState& state, const std::vector<Vec2>& w);

struct Dissipation {
  double visc = 0.0;  // int 2 mu eps(u) : eps(u)
  double pdiv = 0.0;  // int p div u
};
Dissipation dissipation(const mesh::FluidMesh& mesh, const FluidState& state);

// Serial and threaded element loops for the viscous residual; used by
// benchmarks and as a cross-check.
std::vector<Vec2> viscous_reactions_serial(const mesh::FluidMesh& mesh, const ElementGeometry& g,
                                           const std::vector<Vec2>& u, const std::vector<double>& mu);
std::vector<Vec2> viscous_reactions_parallel(const mesh::FluidMesh& mesh, const ElementGeometry& g,
                                             const std::vector<Vec2>& u, const std::vector<double>& mu);

}  // namespace rodfsi::fluid
