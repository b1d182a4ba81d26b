#include "rodfsi/fsi.hpp"

#include <algorithm>
#include <cmath>

namespace rodfsi::fsi {

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::Explicit: return "explicit";
    case Scheme::SemiImplicit: return "semi-implicit";
    case Scheme::PseudoImplicit: return "pseudo-implicit";
  }
  return "?";
}

Scheme scheme_from_name(const std::string& s) {
  if (s == "explicit") return Scheme::Explicit;
  if (s == "semi-implicit" || s == "semi") return Scheme::SemiImplicit;
  if (s == "pseudo-implicit" || s == "pseudo") return Scheme::PseudoImplicit;
  throw ConfigError("unknown scheme '" + s + "' (expected explicit, semi-implicit or pseudo-implicit)");
}

std::vector<Vec2> InducedBasis::apply(const Eigen::VectorXd& alpha) const {
  const Eigen::VectorXd v = W * alpha;
  std::vector<Vec2> out(n_wet());
  for (int k = 0; k < n_wet(); ++k) out[k] = v.segment<2>(2 * k);
  return out;
}

Eigen::VectorXd InducedBasis::apply_transpose(const std::vector<Vec2>& r) const {
  Eigen::VectorXd v(2 * r.size());
  for (std::size_t k = 0; k < r.size(); ++k) v.segment<2>(2 * k) = r[k];
  return W.transpose() * v;
}

std::vector<Vec2> InducedBasis::field(int i) const {
  std::vector<Vec2> out(n_wet(), Vec2::Zero());
  for (Eigen::SparseMatrix<double>::InnerIterator it(W, i); it; ++it) out[it.row() / 2][it.row() % 2] = it.value();
  return out;
}

InducedBasis build_induced_basis(const rod::RodConfig& q, const std::vector<kin::MaterialRecord>& records,
                                 kin::KinematicMode mode) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(records.size() * 16);
  for (std::size_t k = 0; k < records.size(); ++k) {
    const kin::InducedStencil st = kin::induced_stencil(q, records[k], mode);
    for (int c = 0; c < 2; ++c)
      for (int j = 0; j < 8; ++j)
        if (st.W(c, j) != 0.0) trip.emplace_back(static_cast<int>(2 * k + c), 4 * st.element + j, st.W(c, j));
  }
  InducedBasis b;
  b.W.resize(static_cast<int>(2 * records.size()), q.n_dofs());
  b.W.setFromTriplets(trip.begin(), trip.end());
  b.W.makeCompressed();
  return b;
}

Eigen::SparseMatrix<double> wet_mass(const std::vector<Vec2>& wet, bool closed) {
  const int n = static_cast<int>(wet.size());
  const int nseg = closed ? n : n - 1;
  std::vector<Eigen::Triplet<double>> trip;
  for (int s = 0; s < nseg; ++s) {
    const int a = s, b = (s + 1) % n;
    const double L = (wet[b] - wet[a]).norm();
    for (int c = 0; c < 2; ++c) {
      trip.emplace_back(2 * a + c, 2 * a + c, L / 3.0);
      trip.emplace_back(2 * b + c, 2 * b + c, L / 3.0);
      trip.emplace_back(2 * a + c, 2 * b + c, L / 6.0);
      trip.emplace_back(2 * b + c, 2 * a + c, L / 6.0);
    }
  }
  Eigen::SparseMatrix<double> M(2 * n, 2 * n);
  M.setFromTriplets(trip.begin(), trip.end());
  return M;
}

CoupledResidual::CoupledResidual(const Problem& problem, const rod::ReferenceConfig& ref, const rod::RodConfig& q_n,
                                 double t_n, double dt, Scheme scheme,
                                 const std::vector<kin::MaterialRecord>& records)
    : problem_(problem), ref_(ref), q_n_(q_n), t_n_(t_n), dt_(dt), scheme_(scheme) {
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  const int nd = q_n.n_dofs();
  std::vector<char> locked(nd, 0);
  for (const int d : problem.locked_dofs) {
    if (d < 0 || d >= nd) throw ConfigError("locked dof " + std::to_string(d) + " out of range");
    locked[d] = 1;
  }
  for (int i = 0; i < nd; ++i)
    if (!locked[i]) free_.push_back(i);

  const double t_star = scheme == Scheme::PseudoImplicit ? t_n + dt : t_n;
  const std::vector<Vec2> wet = kin::update_wet_positions(q_n, records, problem.mode);
  basis_ = build_induced_basis(q_n, records, problem.mode);

  if (problem.friction) {
    const Eigen::SparseMatrix<double> M = wet_mass(wet, problem.geometry.closed());
    friction_ = problem.friction->beta * Eigen::SparseMatrix<double>(basis_.W.transpose() * M * basis_.W);
  } else {
    mesh_ = std::make_unique<mesh::FluidMesh>(
        mesh::remesh(problem.domain, wet, problem.geometry.closed(), problem.sizing));
    solver_ = std::make_unique<fluid::StokesSolver>(*mesh_, problem.rheology);
    if (problem.inlet) inlet_ = problem.inlet(t_star);
  }

  if (scheme == Scheme::SemiImplicit) S_ = rod::material_stiffness(q_n, ref, problem.law);
  if (scheme != Scheme::PseudoImplicit) grad_frozen_ = rod::energy_gradient(q_n, ref, problem.law, t_n);
  force_ = problem.load.is_zero() ? Eigen::VectorXd::Zero(nd)
                                  : rod::external_force(problem.load, q_n.n_el(), q_n.S(), t_star);
}

CoupledResidual::~CoupledResidual() = default;

Eigen::VectorXd CoupledResidual::expand(const Eigen::VectorXd& a) const {
  Eigen::VectorXd full = Eigen::VectorXd::Zero(q_n_.n_dofs());
  for (std::size_t k = 0; k < free_.size(); ++k) full[free_[k]] = a[k];
  return full;
}

Eigen::VectorXd CoupledResidual::restrict(const Eigen::VectorXd& full) const {
  Eigen::VectorXd a(free_.size());
  for (std::size_t k = 0; k < free_.size(); ++k) a[k] = full[free_[k]];
  return a;
}

bool CoupledResidual::affine() const {
  if (scheme_ == Scheme::PseudoImplicit) return false;
  return problem_.friction.has_value() || fluid::is_newtonian(problem_.rheology);
}

std::vector<Vec2> CoupledResidual::fluid_reactions(const std::vector<Vec2>& wet_u) {
  fluid::BoundaryData bc;
  bc.wet = wet_u;
  bc.inlet = inlet_;
  state_ = solver_->solve(bc, has_state_ ? &state_ : nullptr);
  has_state_ = true;
  const std::vector<Vec2> all = fluid::nodal_reactions(*mesh_, state_);
  std::vector<Vec2> r(mesh_->wet_order.size());
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = all[mesh_->wet_order[k]];
  return r;
}

Eigen::VectorXd CoupledResidual::operator()(const Eigen::VectorXd& alpha_free) {
  if (!alpha_free.allFinite()) throw InstabilityError("non-finite rod velocity");
  ++evaluations_;
  const Eigen::VectorXd alpha = expand(alpha_free);
  last_alpha_ = alpha;

  Eigen::VectorXd R;
  if (problem_.friction) {
    reactions_.clear();
    R = friction_ * alpha;
  } else {
    reactions_ = fluid_reactions(basis_.apply(alpha));
    R = basis_.apply_transpose(reactions_);
  }

  if (scheme_ == Scheme::PseudoImplicit) {
    rod::RodConfig q_star = q_n_;
    q_star.dofs() += dt_ * alpha;
    rod::check_regular(q_star);
    grad_ = rod::energy_gradient(q_star, ref_, problem_.law, t_n_ + dt_);
  } else {
    grad_ = grad_frozen_;
  }
  R += grad_ - force_;
  if (scheme_ == Scheme::SemiImplicit) R += dt_ * (S_ * alpha);
  if (!R.allFinite()) throw InstabilityError("non-finite coupled residual");
  return restrict(R);
}

Eigen::MatrixXd CoupledResidual::jacobian() {
  const int nf = n_free();
  if (last_alpha_.size() == 0) (*this)(Eigen::VectorXd::Zero(nf));
  Eigen::MatrixXd J(q_n_.n_dofs(), nf);
  if (problem_.friction) {
    const Eigen::MatrixXd F = Eigen::MatrixXd(friction_);
    for (int k = 0; k < nf; ++k) J.col(k) = F.col(free_[k]);
  } else {
    solver_->prepare_tangent(state_);
    for (int k = 0; k < nf; ++k)
      J.col(k) = basis_.apply_transpose(solver_->wet_reaction_sensitivity(state_, basis_.field(free_[k])));
  }
  if (scheme_ == Scheme::SemiImplicit)
    for (int k = 0; k < nf; ++k) J.col(k) += dt_ * S_.col(free_[k]);
  if (scheme_ == Scheme::PseudoImplicit) {
    rod::RodConfig q_star = q_n_;
    q_star.dofs() += dt_ * last_alpha_;
    const Eigen::MatrixXd K = rod::material_stiffness(q_star, ref_, problem_.law) +
                              rod::geometric_stiffness(q_star, ref_, problem_.law, t_n_ + dt_);
    for (int k = 0; k < nf; ++k) J.col(k) += dt_ * K.col(free_[k]);
  }
  Eigen::MatrixXd Jr(nf, nf);
  for (int k = 0; k < nf; ++k) Jr.row(k) = J.row(free_[k]);
  return Jr;
}

}  // namespace rodfsi::fsi
