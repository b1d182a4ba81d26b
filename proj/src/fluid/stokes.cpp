#include "rodfsi/fluid.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>

#ifdef RODFSI_HAVE_OPENMP
#include <omp.h>
#endif

namespace rodfsi::fluid {

using mesh::BoundaryTag;
using mesh::FluidMesh;

ElementGeometry::ElementGeometry(const FluidMesh& m) {
  const int nt = m.n_tris();
  area.resize(nt);
  grad.resize(nt);
  h2.resize(nt);
  for (int t = 0; t < nt; ++t) {
    const auto& T = m.tris[t];
    const Vec2 x0 = m.nodes[T[0]], x1 = m.nodes[T[1]], x2 = m.nodes[T[2]];
    const double twice = cross(x1 - x0, x2 - x0);
    if (!(twice > 0.0)) throw MeshError("fluid: triangle " + std::to_string(t) + " is degenerate or inverted");
    area[t] = 0.5 * twice;
    const std::array<Vec2, 3> x{x0, x1, x2};
    for (int a = 0; a < 3; ++a) grad[t][a] = perp(x[(a + 2) % 3] - x[(a + 1) % 3]) / twice;
    h2[t] = std::max({(x1 - x0).squaredNorm(), (x2 - x1).squaredNorm(), (x0 - x2).squaredNorm()});
  }
}

Mat2 strain_rate(const ElementGeometry& g, int t, const std::array<int, 3>& tri, const std::vector<Vec2>& u) {
  Mat2 L = Mat2::Zero();
  for (int a = 0; a < 3; ++a) L += u[tri[a]] * g.grad[t][a].transpose();
  return 0.5 * (L + L.transpose());
}

double shear_rate(const Mat2& eps) { return std::sqrt(eps.cwiseProduct(eps).sum()); }

namespace {

double pressure_mean(const std::array<int, 3>& T, const std::vector<double>& p) {
  return (p[T[0]] + p[T[1]] + p[T[2]]) / 3.0;
}

Vec2 pressure_gradient(const ElementGeometry& g, int t, const std::array<int, 3>& T, const std::vector<double>& p) {
  return g.grad[t][0] * p[T[0]] + g.grad[t][1] * p[T[1]] + g.grad[t][2] * p[T[2]];
}

// Local ordering: 3 * a + c, c = 0, 1 velocity, c = 2 pressure.
void element_residual(const ElementGeometry& g, int t, const std::array<int, 3>& T, const std::vector<Vec2>& u,
                      const std::vector<double>& p, double mu, double r[9]) {
  const Mat2 eps = strain_rate(g, t, T, u);
  const double A = g.area[t];
  const double pm = pressure_mean(T, p);
  const double div = eps.trace();
  const Vec2 gp = pressure_gradient(g, t, T, p);
  const double tau = g.h2[t] / (4.0 * mu);
  for (int a = 0; a < 3; ++a) {
    const Vec2& ga = g.grad[t][a];
    const Vec2 v = A * (2.0 * mu * (eps * ga) - pm * ga);
    r[3 * a] = v.x();
    r[3 * a + 1] = v.y();
    r[3 * a + 2] = -A * (div / 3.0 + tau * gp.dot(ga));
  }
}

void element_matrix(const ElementGeometry& g, int t, const std::array<int, 3>& T, const std::vector<Vec2>& u,
                    const std::vector<double>& p, double mu, double mus, double K[81]) {
  const double A = g.area[t];
  const double tau = g.h2[t] / (4.0 * mu);
  const auto& G = g.grad[t];
  Mat2 eps = Mat2::Zero();
  Vec2 gp = Vec2::Zero();
  std::array<Vec2, 3> eg{};
  if (mus != 0.0) {
    eps = strain_rate(g, t, T, u);
    gp = pressure_gradient(g, t, T, p);
    for (int a = 0; a < 3; ++a) eg[a] = eps * G[a];
  }
  const double dtau = g.h2[t] / (4.0 * mu * mu) * mus * 2.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const double gab = G[a].dot(G[b]);
      for (int c = 0; c < 2; ++c) {
        for (int d = 0; d < 2; ++d) {
          double v = A * mu * ((c == d ? gab : 0.0) + G[b][c] * G[a][d]);
          if (mus != 0.0) v += A * 4.0 * mus * eg[a][c] * eg[b][d];
          K[(3 * a + c) * 9 + 3 * b + d] = v;
        }
        K[(3 * a + c) * 9 + 3 * b + 2] = -A * G[a][c] / 3.0;
        double q = -A * G[a][c] / 3.0;
        if (mus != 0.0) q += A * dtau * eg[a][c] * gp.dot(G[b]);
        K[(3 * b + 2) * 9 + 3 * a + c] = q;
      }
      K[(3 * a + 2) * 9 + 3 * b + 2] = -A * tau * gab;
    }
}

}  // namespace

struct StokesSolver::Impl {
  Eigen::SparseMatrix<double> J;
  std::vector<int> pos;  // 81 slots per triangle into J's value array, -1 if not free
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  bool analyzed = false;
  bool factorized = false;
};

StokesSolver::StokesSolver(const FluidMesh& mesh, Rheology rheology, SolverOptions opts)
    : mesh_(mesh), rheology_(rheology), opts_(opts), geom_(mesh), impl_(std::make_unique<Impl>()) {
  check_rheology(rheology_);
  build_dofs();
  build_pattern();
}

StokesSolver::~StokesSolver() = default;

void StokesSolver::build_dofs() {
  const int nn = mesh_.n_nodes();
  dirichlet_.assign(nn, 0);
  bool open = false;
  for (const auto& e : mesh_.boundary) {
    if (e.tag == BoundaryTag::Open || e.tag == BoundaryTag::Outlet) {
      open = true;
      continue;
    }
    dirichlet_[e.a] = dirichlet_[e.b] = 1;
  }
  wet_slot_.assign(nn, -1);
  for (std::size_t k = 0; k < mesh_.wet_order.size(); ++k) {
    dirichlet_[mesh_.wet_order[k]] = 1;
    wet_slot_[mesh_.wet_order[k]] = static_cast<int>(k);
  }
  for (int t = 0; t < mesh_.n_tris(); ++t) {
    const auto& T = mesh_.tris[t];
    if (wet_slot_[T[0]] >= 0 || wet_slot_[T[1]] >= 0 || wet_slot_[T[2]] >= 0) wet_tris_.push_back(t);
  }
  pinned_ = open ? -1 : 0;

  vdof_.assign(2 * nn, -1);
  pdof_.assign(nn, -1);
  int k = 0;
  for (int i = 0; i < nn; ++i)
    if (!dirichlet_[i]) {
      vdof_[2 * i] = k++;
      vdof_[2 * i + 1] = k++;
    }
  for (int i = 0; i < nn; ++i)
    if (i != pinned_) pdof_[i] = k++;
  n_free_ = k;
}

void StokesSolver::build_pattern() {
  const int nt = mesh_.n_tris();
  auto gid = [&](int node, int c) { return c < 2 ? vdof_[2 * node + c] : pdof_[node]; };
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(nt) * 81);
  for (int t = 0; t < nt; ++t) {
    const auto& T = mesh_.tris[t];
    for (int k = 0; k < 9; ++k) {
      const int r = gid(T[k / 3], k % 3);
      if (r < 0) continue;
      for (int l = 0; l < 9; ++l) {
        const int c = gid(T[l / 3], l % 3);
        if (c >= 0) trip.emplace_back(r, c, 0.0);
      }
    }
  }
  Eigen::SparseMatrix<double>& J = impl_->J;
  J.resize(n_free_, n_free_);
  J.setFromTriplets(trip.begin(), trip.end());
  J.makeCompressed();

  impl_->pos.assign(static_cast<std::size_t>(nt) * 81, -1);
  const int* outer = J.outerIndexPtr();
  const int* inner = J.innerIndexPtr();
  for (int t = 0; t < nt; ++t) {
    const auto& T = mesh_.tris[t];
    for (int k = 0; k < 9; ++k) {
      const int r = gid(T[k / 3], k % 3);
      if (r < 0) continue;
      for (int l = 0; l < 9; ++l) {
        const int c = gid(T[l / 3], l % 3);
        if (c < 0) continue;
        const int* lo = inner + outer[c];
        const int* hi = inner + outer[c + 1];
        impl_->pos[static_cast<std::size_t>(t) * 81 + k * 9 + l] = static_cast<int>(std::lower_bound(lo, hi, r) - inner);
      }
    }
  }
}

std::vector<Vec2> StokesSolver::lift(const BoundaryData& bc) const {
  const int nn = mesh_.n_nodes();
  if (bc.wet.size() != mesh_.wet_order.size())
    throw DomainError("fluid: expected " + std::to_string(mesh_.wet_order.size()) + " wet velocities, got " +
                      std::to_string(bc.wet.size()));
  std::vector<Vec2> u(nn, Vec2::Zero());
  std::vector<char> wall(nn, 0), inlet(nn, 0);
  for (const auto& e : mesh_.boundary) {
    if (e.tag == BoundaryTag::Wall) wall[e.a] = wall[e.b] = 1;
    if (e.tag == BoundaryTag::Inlet) inlet[e.a] = inlet[e.b] = 1;
  }
  bool need_inlet = false;
  for (int i = 0; i < nn; ++i) need_inlet |= inlet[i] && !wall[i];
  if (need_inlet && !bc.inlet) throw DomainError("fluid: mesh has inlet edges but no inlet profile was given");
  for (int i = 0; i < nn; ++i)
    if (inlet[i] && !wall[i]) u[i] = bc.inlet(mesh_.nodes[i]);
  for (std::size_t k = 0; k < mesh_.wet_order.size(); ++k) {
    if (!bc.wet[k].allFinite()) throw NumericalError("fluid: non-finite wet velocity");
    u[mesh_.wet_order[k]] = bc.wet[k];
  }
  return u;
}

void StokesSolver::update_viscosity(const std::vector<Vec2>& u) {
  const int nt = mesh_.n_tris();
  mu_.resize(nt);
  if (const auto* n = std::get_if<Newtonian>(&rheology_)) {
    std::fill(mu_.begin(), mu_.end(), n->mu);
    return;
  }
#pragma omp parallel for if (opts_.parallel) schedule(static)
  for (int t = 0; t < nt; ++t) mu_[t] = viscosity(rheology_, shear_rate(strain_rate(geom_, t, mesh_.tris[t], u)));
}

void StokesSolver::assemble(const std::vector<Vec2>& u, const std::vector<double>& p, bool newton) {
  Eigen::SparseMatrix<double>& J = impl_->J;
  double* val = J.valuePtr();
  std::fill(val, val + J.nonZeros(), 0.0);
  const int nt = mesh_.n_tris();
  const int* pos = impl_->pos.data();
#pragma omp parallel for if (opts_.parallel) schedule(static)
  for (int t = 0; t < nt; ++t) {
    const auto& T = mesh_.tris[t];
    const double g = newton ? shear_rate(strain_rate(geom_, t, T, u)) : 0.0;
    const double mus = newton ? viscosity_slope(rheology_, g) : 0.0;
    double K[81];
    element_matrix(geom_, t, T, u, p, mu_[t], mus, K);
    const int* tp = pos + static_cast<std::size_t>(t) * 81;
    for (int k = 0; k < 81; ++k) {
      if (tp[k] < 0) continue;
#pragma omp atomic
      val[tp[k]] += K[k];
    }
  }
}

void StokesSolver::factorize() {
  auto& lu = impl_->lu;
  if (!impl_->analyzed) {
    lu.analyzePattern(impl_->J);
    impl_->analyzed = true;
  }
  lu.factorize(impl_->J);
  if (lu.info() != Eigen::Success) {
    impl_->factorized = false;
    throw SolverError(pinned_ < 0 ? "fluid: singular Stokes system"
                                  : "fluid: singular Stokes system (pressure gauge pinned at node 0)");
  }
  impl_->factorized = true;
}

Eigen::VectorXd StokesSolver::solve_linear(const Eigen::VectorXd& rhs) const {
  Eigen::VectorXd x = impl_->lu.solve(rhs);
  if (!x.allFinite()) throw SolverError("fluid: linear solve produced non-finite values");
  return x;
}

void StokesSolver::scatter(const Eigen::VectorXd& x, std::vector<Vec2>& u, std::vector<double>& p,
                           double step) const {
  const int nn = mesh_.n_nodes();
  for (int i = 0; i < nn; ++i) {
    if (vdof_[2 * i] >= 0) {
      u[i].x() += step * x[vdof_[2 * i]];
      u[i].y() += step * x[vdof_[2 * i + 1]];
    }
    if (pdof_[i] >= 0) p[i] += step * x[pdof_[i]];
  }
}

Eigen::VectorXd StokesSolver::residual_with(const std::vector<Vec2>& u, const std::vector<double>& p,
                                            const std::vector<double>& mu) const {
  Eigen::VectorXd R = Eigen::VectorXd::Zero(n_free_);
  const int nt = mesh_.n_tris();
  double* out = R.data();
#pragma omp parallel for if (opts_.parallel) schedule(static)
  for (int t = 0; t < nt; ++t) {
    const auto& T = mesh_.tris[t];
    double r[9];
    element_residual(geom_, t, T, u, p, mu[t], r);
    for (int k = 0; k < 9; ++k) {
      const int node = T[k / 3], c = k % 3;
      const int row = c < 2 ? vdof_[2 * node + c] : pdof_[node];
      if (row < 0) continue;
#pragma omp atomic
      out[row] += r[k];
    }
  }
  return R;
}

Eigen::VectorXd StokesSolver::residual(const std::vector<Vec2>& u, const std::vector<double>& p) const {
  std::vector<double> mu(mesh_.n_tris());
  for (int t = 0; t < mesh_.n_tris(); ++t)
    mu[t] = viscosity(rheology_, shear_rate(strain_rate(geom_, t, mesh_.tris[t], u)));
  return residual_with(u, p, mu);
}

FluidState StokesSolver::solve(const BoundaryData& bc, const FluidState* guess) {
  FluidState s;
  s.u = lift(bc);
  s.p.assign(mesh_.n_nodes(), 0.0);
  if (guess) {
    if (guess->u.size() != s.u.size() || guess->p.size() != s.p.size())
      throw DomainError("fluid: initial guess belongs to a different mesh");
    for (int i = 0; i < mesh_.n_nodes(); ++i)
      if (!dirichlet_[i]) s.u[i] = guess->u[i];
    s.p = guess->p;
    if (pinned_ >= 0) s.p[pinned_] = 0.0;
  }
  update_viscosity(s.u);

  if (is_newtonian(rheology_)) {
    if (!impl_->factorized) {
      assemble(s.u, s.p, false);
      factorize();
    }
    const Eigen::VectorXd R = residual_with(s.u, s.p, mu_);
    scatter(solve_linear(-R), s.u, s.p, 1.0);
    s.newton_iterations = 1;
    s.mu_cell = mu_;
    return s;
  }

  Eigen::VectorXd R = residual_with(s.u, s.p, mu_);
  double rn = R.lpNorm<Eigen::Infinity>();
  int it = 0;
  while (rn > opts_.tol) {
    if (it == opts_.max_iter)
      throw SolverError("fluid: Newton iteration did not converge in " + std::to_string(opts_.max_iter) +
                        " iterations (residual " + std::to_string(rn) + ")");
    ++it;
    assemble(s.u, s.p, true);
    factorize();
    const Eigen::VectorXd dx = solve_linear(-R);
    const double r2 = R.norm();
    double lam = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls, lam *= 0.5) {
      std::vector<Vec2> u = s.u;
      std::vector<double> p = s.p;
      scatter(dx, u, p, lam);
      update_viscosity(u);
      Eigen::VectorXd Rt = residual_with(u, p, mu_);
      if (Rt.allFinite() && Rt.norm() <= (1.0 - 1e-4 * lam) * r2) {
        s.u = std::move(u);
        s.p = std::move(p);
        R = std::move(Rt);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      update_viscosity(s.u);
      throw SolverError("fluid: line search failed (residual " + std::to_string(rn) + ")");
    }
    rn = R.lpNorm<Eigen::Infinity>();
  }
  // Newtonian-like data (e.g. zero flow) may converge without a step.
  s.newton_iterations = it;
  s.mu_cell = mu_;
  impl_->factorized = false;
  return s;
}

void StokesSolver::prepare_tangent(const FluidState& at) {
  if (is_newtonian(rheology_)) {
    if (!impl_->factorized) {
      update_viscosity(at.u);
      assemble(at.u, at.p, false);
      factorize();
    }
    return;
  }
  update_viscosity(at.u);
  assemble(at.u, at.p, true);
  factorize();
}

std::vector<Vec2> StokesSolver::wet_reaction_sensitivity(const FluidState& at, const std::vector<Vec2>& dwet) const {
  if (!impl_->factorized) throw SolverError("fluid: tangent requested before prepare_tangent");
  if (dwet.size() != mesh_.wet_order.size()) throw DomainError("fluid: wet perturbation size mismatch");
  const bool newton = !is_newtonian(rheology_);
  std::vector<std::array<double, 81>> K(wet_tris_.size());
  for (std::size_t k = 0; k < wet_tris_.size(); ++k) {
    const int t = wet_tris_[k];
    const auto& T = mesh_.tris[t];
    const double mus = newton ? viscosity_slope(rheology_, shear_rate(strain_rate(geom_, t, T, at.u))) : 0.0;
    element_matrix(geom_, t, T, at.u, at.p, at.mu_cell[t], mus, K[k].data());
  }
  // Local perturbation vector: prescribed wet values, later the interior response.
  auto local = [&](const std::array<int, 3>& T, const Eigen::VectorXd* dx, double v[9]) {
    for (int a = 0; a < 3; ++a) {
      const int node = T[a];
      const int w = wet_slot_[node];
      for (int c = 0; c < 2; ++c) {
        const int d = vdof_[2 * node + c];
        v[3 * a + c] = w >= 0 ? dwet[w][c] : (d >= 0 && dx ? (*dx)[d] : 0.0);
      }
      const int d = pdof_[node];
      v[3 * a + 2] = d >= 0 && dx ? (*dx)[d] : 0.0;
    }
  };
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n_free_);
  for (std::size_t k = 0; k < wet_tris_.size(); ++k) {
    const auto& T = mesh_.tris[wet_tris_[k]];
    double v[9];
    local(T, nullptr, v);
    for (int r = 0; r < 9; ++r) {
      const int node = T[r / 3], c = r % 3;
      const int row = c < 2 ? vdof_[2 * node + c] : pdof_[node];
      if (row < 0) continue;
      double sum = 0.0;
      for (int l = 0; l < 9; ++l) sum += K[k][r * 9 + l] * v[l];
      b[row] += sum;
    }
  }
  const Eigen::VectorXd dx = solve_linear(-b);
  std::vector<Vec2> dr(mesh_.wet_order.size(), Vec2::Zero());
  for (std::size_t k = 0; k < wet_tris_.size(); ++k) {
    const auto& T = mesh_.tris[wet_tris_[k]];
    double v[9];
    local(T, &dx, v);
    for (int a = 0; a < 3; ++a) {
      const int w = wet_slot_[T[a]];
      if (w < 0) continue;
      for (int c = 0; c < 2; ++c) {
        double sum = 0.0;
        for (int l = 0; l < 9; ++l) sum += K[k][(3 * a + c) * 9 + l] * v[l];
        dr[w][c] += sum;
      }
    }
  }
  return dr;
}

FluidState solve_fluid(const FluidMesh& mesh, const BoundaryData& bc, const Rheology& rheology,
                       const SolverOptions& opts) {
  StokesSolver solver(mesh, rheology, opts);
  return solver.solve(bc);
}

std::vector<Vec2> viscous_reactions_serial(const FluidMesh& mesh, const ElementGeometry& g,
                                           const std::vector<Vec2>& u, const std::vector<double>& mu) {
  std::vector<Vec2> r(mesh.n_nodes(), Vec2::Zero());
  for (int t = 0; t < mesh.n_tris(); ++t) {
    const auto& T = mesh.tris[t];
    const Mat2 s = 2.0 * mu[t] * g.area[t] * strain_rate(g, t, T, u);
    for (int a = 0; a < 3; ++a) r[T[a]] += s * g.grad[t][a];
  }
  return r;
}

std::vector<Vec2> viscous_reactions_parallel(const FluidMesh& mesh, const ElementGeometry& g,
                                             const std::vector<Vec2>& u, const std::vector<double>& mu) {
#ifdef RODFSI_HAVE_OPENMP
  const int nn = mesh.n_nodes();
  const int nt = mesh.n_tris();
  const int nth = omp_get_max_threads();
  if (nth == 1) return viscous_reactions_serial(mesh, g, u, mu);
  std::vector<std::vector<Vec2>> part(nth);
#pragma omp parallel num_threads(nth)
  {
    const int id = omp_get_thread_num();
    auto& mine = part[id];
    mine.assign(nn, Vec2::Zero());
#pragma omp for schedule(static)
    for (int t = 0; t < nt; ++t) {
      const auto& T = mesh.tris[t];
      const Mat2 s = 2.0 * mu[t] * g.area[t] * strain_rate(g, t, T, u);
      for (int a = 0; a < 3; ++a) mine[T[a]] += s * g.grad[t][a];
    }
  }
  std::vector<Vec2> r(nn, Vec2::Zero());
#pragma omp parallel for schedule(static)
  for (int i = 0; i < nn; ++i)
    for (int k = 0; k < nth; ++k) r[i] += part[k][i];
  return r;
#else
  return viscous_reactions_serial(mesh, g, u, mu);
#endif
}

std::vector<Vec2> nodal_reactions(const FluidMesh& mesh, const FluidState& state, bool parallel) {
  const ElementGeometry g(mesh);
  std::vector<Vec2> r = parallel ? viscous_reactions_parallel(mesh, g, state.u, state.mu_cell)
                                 : viscous_reactions_serial(mesh, g, state.u, state.mu_cell);
  for (int t = 0; t < mesh.n_tris(); ++t) {
    const auto& T = mesh.tris[t];
    const double pa = g.area[t] * pressure_mean(T, state.p);
    for (int a = 0; a < 3; ++a) r[T[a]] -= pa * g.grad[t][a];
  }
  return r;
}

double virtual_work(const FluidMesh& mesh, const FluidState& state, const std::vector<Vec2>& w) {
  if (static_cast<int>(w.size()) != mesh.n_nodes()) throw DomainError("fluid: test field size mismatch");
  const ElementGeometry g(mesh);
  double sum = 0.0;
  for (int t = 0; t < mesh.n_tris(); ++t) {
    const auto& T = mesh.tris[t];
    const Mat2 eu = strain_rate(g, t, T, state.u);
    const Mat2 ew = strain_rate(g, t, T, w);
    sum += g.area[t] * (2.0 * state.mu_cell[t] * eu.cwiseProduct(ew).sum() - pressure_mean(T, state.p) * ew.trace());
  }
  return sum;
}

Dissipation dissipation(const FluidMesh& mesh, const FluidState& state) {
  const ElementGeometry g(mesh);
  Dissipation d;
  for (int t = 0; t < mesh.n_tris(); ++t) {
    const auto& T = mesh.tris[t];
    const Mat2 e = strain_rate(g, t, T, state.u);
    d.visc += g.area[t] * 2.0 * state.mu_cell[t] * e.cwiseProduct(e).sum();
    d.pdiv += g.area[t] * pressure_mean(T, state.p) * e.trace();
  }
  return d;
}

}  // namespace rodfsi::fluid
