#pragma once
//
// Rod-fluid coupling.
//
// One step from t_n to t_n+1 = t_n + dt looks for the rod velocity
// alpha = (q^{n+1} - q^n) / dt such that, for every rod dof i,
//
//   R_i(alpha) = b(u_h(alpha), p_h(alpha); w^i) + <D_q E(t*, q*), N^i>
//                + dt S(q^n; alpha, N^i) - <F(t*), N^i> = 0,
//
// where w^i is the fluid velocity induced on the wet nodes by the i-th rod
// shape function and (u_h, p_h) solves the Stokes problem on the mesh of
// the fluid domain at q^n with wet data sum_i alpha_i w^i.
//
//   Explicit        t* = t_n,    q* = q^n,             S = 0
//   SemiImplicit    t* = t_n,    q* = q^n,             S = material stiffness at q^n
//   PseudoImplicit  t* = t_n+1,  q* = q^n + dt alpha,  S = 0
//
#include "rodfsi/common.hpp"
#include "rodfsi/fluid.hpp"
#include "rodfsi/kinematics.hpp"
#include "rodfsi/mesh.hpp"
#include "rodfsi/rod.hpp"

#include <Eigen/SparseCore>

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace rodfsi::fsi {

enum class Scheme { Explicit, SemiImplicit, PseudoImplicit };

const char* scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& s);

enum class Preconditioner { None, Dense };

struct SchemeConfig {
  Scheme scheme = Scheme::SemiImplicit;
  double dt = 0.01;
  bool adaptive = false;
  double dt_min = 1e-5;
  double dt_max = 0.1;
  double zeta = 0.5;       // target displacement per step, in units of h_wet
  double f_tol = 1e-8;     // residual infinity norm
  int max_outer = 50;
  int krylov_restart = 20;
  int max_krylov = 200;    // inner iterations per outer iteration
  double fd_step = 0.0;    // 0 selects sqrt(machine epsilon)
  bool linear_path = true; // direct solve when the residual is affine
  Preconditioner preconditioner = Preconditioner::Dense;
};

// Surface drag -beta u on the wet surface in place of the fluid.
struct FrictionModel {
  double beta = 10.0;
};

using InletSchedule = std::function<fluid::InletProfile(double t)>;

struct Problem {
  mesh::DomainSpec domain;
  mesh::Sizing sizing;
  kin::BodyGeometry geometry;
  kin::KinematicMode mode = kin::KinematicMode::AEqualsInverseNorm;
  int n_el = 8;
  rod::ElasticLaw law;
  rod::ExternalLoad load;
  fluid::Rheology rheology = fluid::Newtonian{1.0};
  std::optional<FrictionModel> friction;
  InletSchedule inlet;           // required when the domain has inlet sides
  std::vector<int> locked_dofs;  // held at their initial values
};

// Wet velocities as a linear map of the rod velocity: row 2k + c gives
// component c at wet node k.
struct InducedBasis {
  Eigen::SparseMatrix<double> W;

  int n_dofs() const { return static_cast<int>(W.cols()); }
  int n_wet() const { return static_cast<int>(W.rows() / 2); }
  std::vector<Vec2> apply(const Eigen::VectorXd& alpha) const;
  Eigen::VectorXd apply_transpose(const std::vector<Vec2>& r) const;
  // Values of the i-th basis field at the wet nodes.
  std::vector<Vec2> field(int i) const;
};

InducedBasis build_induced_basis(const rod::RodConfig& q, const std::vector<kin::MaterialRecord>& records,
                                 kin::KinematicMode mode);

// Consistent line mass of piecewise linear fields on the wet polyline.
Eigen::SparseMatrix<double> wet_mass(const std::vector<Vec2>& wet, bool closed);

// Data frozen at t_n and the residual as a function of the free components
// of alpha.
class CoupledResidual {
 public:
  CoupledResidual(const Problem& problem, const rod::ReferenceConfig& ref, const rod::RodConfig& q_n, double t_n,
                  double dt, Scheme scheme, const std::vector<kin::MaterialRecord>& records);
  ~CoupledResidual();

  int n_free() const { return static_cast<int>(free_.size()); }
  const std::vector<int>& free_dofs() const { return free_; }
  Eigen::VectorXd expand(const Eigen::VectorXd& alpha_free) const;
  Eigen::VectorXd restrict(const Eigen::VectorXd& full) const;

  Eigen::VectorXd operator()(const Eigen::VectorXd& alpha_free);
  // Affine in alpha: Newtonian or friction with Explicit or SemiImplicit.
  bool affine() const;
  // Dense Jacobian: exact when affine, otherwise the linearization at the
  // last evaluated point (fluid tangent plus rod stiffness).
  Eigen::MatrixXd jacobian();

  const mesh::FluidMesh* mesh() const { return mesh_.get(); }
  const InducedBasis& basis() const { return basis_; }
  // Fluid state of the last evaluation (absent for the friction model).
  const fluid::FluidState* fluid_state() const { return has_state_ ? &state_ : nullptr; }
  const std::vector<Vec2>& last_wet_reactions() const { return reactions_; }
  const Eigen::VectorXd& last_alpha() const { return last_alpha_; }
  int evaluations() const { return evaluations_; }

  // Rod terms of the residual at the last evaluated point.
  const Eigen::VectorXd& energy_gradient() const { return grad_; }
  const Eigen::MatrixXd& stabilization() const { return S_; }

 private:
  std::vector<Vec2> fluid_reactions(const std::vector<Vec2>& wet_u);

  const Problem& problem_;
  const rod::ReferenceConfig& ref_;
  rod::RodConfig q_n_;
  double t_n_, dt_;
  Scheme scheme_;
  std::vector<int> free_;
  std::unique_ptr<mesh::FluidMesh> mesh_;
  std::unique_ptr<fluid::StokesSolver> solver_;
  InducedBasis basis_;
  Eigen::SparseMatrix<double> friction_;  // beta W^T M W, when active
  fluid::InletProfile inlet_;
  Eigen::MatrixXd S_;
  Eigen::VectorXd grad_frozen_, force_;
  Eigen::VectorXd grad_;
  fluid::FluidState state_;
  bool has_state_ = false;
  std::vector<Vec2> reactions_;
  Eigen::VectorXd last_alpha_;
  int evaluations_ = 0;
};

struct StepStats {
  int outer = 0;
  int krylov = 0;
  int evaluations = 0;
  double residual = 0.0;
  bool direct = false;
};

// Solves R(alpha) = 0 from the initial guess. Returns the free components.
Eigen::VectorXd solve_step(CoupledResidual& R, const SchemeConfig& cfg, const Eigen::VectorXd& guess,
                           StepStats& stats);

// Restarted GMRES with right preconditioning on a matrix-free operator.
struct GmresResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};
GmresResult gmres(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& A,
                  const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& M_inv, const Eigen::VectorXd& b,
                  double rel_tol, int restart, int max_iter);

// PI control of dt on the largest nodal displacement per step.
class DtController {
 public:
  DtController(double target, double dt_min, double dt_max);
  // Given the step just taken and its displacement, proposes the next dt.
  double next(double dt, double displacement);

 private:
  double target_, dt_min_, dt_max_;
  double prev_ratio_ = 1.0;
};

struct DiagnosticsRecord {
  double t = 0.0;
  double E = 0.0;
  double visc = 0.0;
  double pdiv = 0.0;
  double S_term = 0.0;  // dt S(q^n; alpha, alpha)
  Vec2 left = Vec2::Zero();
  double dt = 0.0;
  int iterations = 0;
  // <D_q E, alpha> + b(u; u) + dt S(alpha, alpha) - <F, alpha>, zero up to the solver tolerance.
  double identity_residual = 0.0;
  double fluid_power = 0.0;  // sum over wet nodes of reaction . velocity
  int n_tris = 0;
};

class Simulation {
 public:
  Simulation(Problem problem, SchemeConfig scheme);
  Simulation(Problem problem, SchemeConfig scheme, rod::RodConfig q0);

  const Problem& problem() const { return problem_; }
  const SchemeConfig& scheme() const { return cfg_; }
  SchemeConfig& scheme() { return cfg_; }
  double time() const { return t_; }
  double dt() const { return dt_; }
  const rod::RodConfig& config() const { return q_; }
  const rod::ReferenceConfig& reference() const { return ref_; }
  const std::vector<kin::MaterialRecord>& records() const { return records_; }
  double energy() const;

  // Advances one step. On failure the state is left at t_n.
  DiagnosticsRecord step();
  // Steps until t >= T (the last step is shortened to land on T).
  void run_until(double T, const std::function<void(const DiagnosticsRecord&)>& on_step = {});

  // Mesh and fluid state of the last step (null before the first step or
  // with the friction model).
  const mesh::FluidMesh* last_mesh() const { return last_mesh_.get(); }
  const fluid::FluidState* last_fluid() const { return last_fluid_ ? &*last_fluid_ : nullptr; }
  const Eigen::VectorXd& last_velocity() const { return alpha_; }
  const StepStats& last_stats() const { return stats_; }

 private:
  DiagnosticsRecord step_with(double dt);

  Problem problem_;
  SchemeConfig cfg_;
  rod::ReferenceConfig ref_;
  std::vector<kin::MaterialRecord> records_;
  rod::RodConfig q_;
  double t_ = 0.0;
  double dt_ = 0.0;
  Eigen::VectorXd alpha_;
  std::optional<DtController> controller_;
  std::unique_ptr<mesh::FluidMesh> last_mesh_;
  std::optional<fluid::FluidState> last_fluid_;
  StepStats stats_;
};

// Scalar energy-balance bookkeeping over a diagnostics stream:
// R_E = (E_n - E_{n-1}) / dt + visc - pdiv + S_term, integrated over t in (t0, t1].
struct EnergyBalance {
  double visc = 0.0;
  double minus_pdiv = 0.0;
  double S = 0.0;
  double dE = 0.0;
  double error() const;  // |dE + visc + minus_pdiv + S|
};
EnergyBalance energy_balance(const std::vector<DiagnosticsRecord>& records, double E0, double t0, double t1);

}  // namespace rodfsi::fsi
