#include "rodfsi/fsi.hpp"

#include <algorithm>
#include <cmath>

namespace rodfsi::fsi {

Simulation::Simulation(Problem problem, SchemeConfig scheme)
    : Simulation(problem, scheme, kin::reference_rod(problem.geometry, problem.n_el)) {}

Simulation::Simulation(Problem problem, SchemeConfig scheme, rod::RodConfig q0)
    : problem_(std::move(problem)), cfg_(scheme), q_(std::move(q0)) {
  if (problem_.n_el < 1) throw ConfigError("n_el must be at least 1");
  if (q_.n_el() != problem_.n_el) throw ConfigError("initial configuration does not match n_el");
  if (!(cfg_.dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(problem_.law.C_eps > 0.0) || !(problem_.law.C_kappa > 0.0))
    throw ConfigError("C_eps and C_kappa must be positive");
  if (!problem_.friction) fluid::check_rheology(problem_.rheology);
  if (problem_.friction && !(problem_.friction->beta > 0.0)) throw ConfigError("friction beta must be positive");
  for (const int d : problem_.locked_dofs)
    if (d < 0 || d >= q_.n_dofs()) throw ConfigError("locked dof " + std::to_string(d) + " out of range");
  ref_ = rod::ReferenceConfig(kin::reference_rod(problem_.geometry, problem_.n_el));
  records_ = kin::build_wet_records(problem_.geometry, problem_.sizing.h_wet);
  rod::check_regular(q_);
  dt_ = cfg_.dt;
  if (cfg_.adaptive) {
    dt_ = std::clamp(cfg_.dt, cfg_.dt_min, cfg_.dt_max);
    controller_.emplace(cfg_.zeta * problem_.sizing.h_wet, cfg_.dt_min, cfg_.dt_max);
  }
}

double Simulation::energy() const { return rod::elastic_energy(q_, ref_, problem_.law, t_); }

DiagnosticsRecord Simulation::step() { return step_with(dt_); }

DiagnosticsRecord Simulation::step_with(double dt) {
  CoupledResidual R(problem_, ref_, q_, t_, dt, cfg_.scheme, records_);
  const Eigen::VectorXd guess = alpha_.size() == q_.n_dofs() ? R.restrict(alpha_) : Eigen::VectorXd();
  const Eigen::VectorXd a_free = solve_step(R, cfg_, guess, stats_);
  const Eigen::VectorXd alpha = R.expand(a_free);

  rod::RodConfig q_new = q_;
  q_new.dofs() += dt * alpha;
  if (!q_new.dofs().allFinite()) throw InstabilityError("rod configuration became non-finite");
  rod::check_regular(q_new);

  DiagnosticsRecord rec;
  rec.t = t_ + dt;
  rec.dt = dt;
  rec.E = rod::elastic_energy(q_new, ref_, problem_.law, rec.t);
  if (!std::isfinite(rec.E)) throw InstabilityError("elastic energy became non-finite");
  rec.left = q_new.position(0);
  rec.iterations = stats_.outer;

  const std::vector<Vec2> u = R.basis().apply(alpha);
  if (const fluid::FluidState* fs = R.fluid_state()) {
    const fluid::Dissipation d = fluid::dissipation(*R.mesh(), *fs);
    rec.visc = d.visc;
    rec.pdiv = d.pdiv;
    const auto& react = R.last_wet_reactions();
    for (std::size_t k = 0; k < u.size(); ++k) rec.fluid_power += react[k].dot(u[k]);
    rec.n_tris = R.mesh()->n_tris();
  } else {
    const std::vector<Vec2> wet = kin::update_wet_positions(q_, records_, problem_.mode);
    Eigen::VectorXd uv(2 * u.size());
    for (std::size_t k = 0; k < u.size(); ++k) uv.segment<2>(2 * k) = u[k];
    rec.visc = problem_.friction->beta * uv.dot(wet_mass(wet, problem_.geometry.closed()) * uv);
    rec.fluid_power = rec.visc;
  }
  if (cfg_.scheme == Scheme::SemiImplicit) rec.S_term = dt * alpha.dot(R.stabilization() * alpha);
  const Eigen::VectorXd F = problem_.load.is_zero()
                                ? Eigen::VectorXd::Zero(q_.n_dofs())
                                : rod::external_force(problem_.load, q_.n_el(), q_.S(), t_);
  rec.identity_residual = alpha.dot(R.energy_gradient()) + rec.fluid_power + rec.S_term - alpha.dot(F);

  // Commit.
  q_ = std::move(q_new);
  t_ = rec.t;
  alpha_ = alpha;
  if (R.mesh()) {
    last_mesh_ = std::make_unique<mesh::FluidMesh>(*R.mesh());
    last_fluid_ = *R.fluid_state();
  }
  if (controller_) {
    double disp = 0.0;
    for (int i = 0; i < q_.n_nodes(); ++i) disp = std::max(disp, dt * alpha.segment<2>(4 * i).norm());
    dt_ = controller_->next(dt, disp);
  }
  return rec;
}

void Simulation::run_until(double T, const std::function<void(const DiagnosticsRecord&)>& on_step) {
  while (T - t_ > 1e-9 * dt_) {
    double dt = dt_;
    if (T - t_ < dt * (1.0 + 1e-9)) dt = T - t_;
    const DiagnosticsRecord rec = step_with(dt);
    if (on_step) on_step(rec);
  }
}

}  // namespace rodfsi::fsi
