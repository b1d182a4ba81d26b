#include "rodfsi/fsi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rodfsi::fsi {

GmresResult gmres(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& A,
                  const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& M_inv, const Eigen::VectorXd& b,
                  double rel_tol, int restart, int max_iter) {
  const int n = static_cast<int>(b.size());
  GmresResult out;
  out.x = Eigen::VectorXd::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    out.converged = true;
    return out;
  }
  const int m = std::max(1, std::min(restart, n));
  Eigen::VectorXd r = b;
  double beta = bnorm;
  double prev = bnorm;
  while (out.iterations < max_iter) {
    Eigen::MatrixXd V = Eigen::MatrixXd::Zero(n, m + 1);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
    Eigen::VectorXd cs = Eigen::VectorXd::Zero(m), sn = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(m + 1);
    V.col(0) = r / beta;
    g[0] = beta;
    int k = 0;
    for (; k < m && out.iterations < max_iter; ++k) {
      ++out.iterations;
      Eigen::VectorXd w = A(M_inv(V.col(k)));
      for (int j = 0; j <= k; ++j) {
        H(j, k) = w.dot(V.col(j));
        w -= H(j, k) * V.col(j);
      }
      H(k + 1, k) = w.norm();
      if (H(k + 1, k) > 0.0) V.col(k + 1) = w / H(k + 1, k);
      for (int j = 0; j < k; ++j) {
        const double t = cs[j] * H(j, k) + sn[j] * H(j + 1, k);
        H(j + 1, k) = -sn[j] * H(j, k) + cs[j] * H(j + 1, k);
        H(j, k) = t;
      }
      const double d = std::hypot(H(k, k), H(k + 1, k));
      cs[k] = d > 0.0 ? H(k, k) / d : 1.0;
      sn[k] = d > 0.0 ? H(k + 1, k) / d : 0.0;
      H(k, k) = d;
      H(k + 1, k) = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      if (std::abs(g[k + 1]) <= rel_tol * bnorm || H(k, k) == 0.0) {
        ++k;
        break;
      }
    }
    const Eigen::VectorXd y =
        H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    out.x += M_inv(V.leftCols(k) * y);
    r = b - A(out.x);
    beta = r.norm();
    out.residual = beta / bnorm;
    if (!std::isfinite(beta)) return out;
    if (beta <= rel_tol * bnorm) {
      out.converged = true;
      return out;
    }
    // A restart cycle that does not halve the residual has stagnated.
    if (beta > 0.5 * prev) return out;
    prev = beta;
  }
  return out;
}

namespace {

double inf_norm(const Eigen::VectorXd& v) { return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0; }

Eigen::VectorXd direct_path(CoupledResidual& R, const SchemeConfig& cfg, StepStats& stats) {
  const int n = R.n_free();
  const Eigen::VectorXd r0 = R(Eigen::VectorXd::Zero(n));
  Eigen::MatrixXd J(n, n);
  for (int i = 0; i < n; ++i) J.col(i) = R(Eigen::VectorXd::Unit(n, i)) - r0;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
  Eigen::VectorXd alpha = lu.solve(-r0);
  if (!alpha.allFinite()) throw InstabilityError("direct coupled solve produced non-finite values");
  Eigen::VectorXd r = R(alpha);
  // Iterative refinement against rounding.
  for (int k = 0; k < 3 && inf_norm(r) > cfg.f_tol; ++k) {
    alpha -= lu.solve(r);
    r = R(alpha);
  }
  stats.outer = 1;
  stats.direct = true;
  stats.residual = inf_norm(r);
  if (!(stats.residual <= cfg.f_tol))
    throw SolverError("direct coupled solve left residual " + std::to_string(stats.residual));
  return alpha;
}

}  // namespace

Eigen::VectorXd solve_step(CoupledResidual& R, const SchemeConfig& cfg, const Eigen::VectorXd& guess,
                           StepStats& stats) {
  stats = StepStats{};
  const int n = R.n_free();
  Eigen::VectorXd alpha;
  if (cfg.linear_path && R.affine()) {
    alpha = direct_path(R, cfg, stats);
    stats.evaluations = R.evaluations();
    return alpha;
  }

  alpha = guess.size() == n && guess.allFinite() ? guess : Eigen::VectorXd::Zero(n);
  Eigen::VectorXd r = R(alpha);
  const double fd = cfg.fd_step > 0.0 ? cfg.fd_step : std::sqrt(std::numeric_limits<double>::epsilon());
  for (;;) {
    stats.residual = inf_norm(r);
    if (stats.residual <= cfg.f_tol) break;
    if (stats.outer == cfg.max_outer)
      throw SolverError("Newton-Krylov did not converge in " + std::to_string(cfg.max_outer) +
                        " iterations (residual " + std::to_string(stats.residual) + ")");
    ++stats.outer;

    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> M_inv = [](const Eigen::VectorXd& v) { return v; };
    Eigen::PartialPivLU<Eigen::MatrixXd> P;
    if (cfg.preconditioner == Preconditioner::Dense) {
      P.compute(R.jacobian());
      M_inv = [&P](const Eigen::VectorXd& v) { return Eigen::VectorXd(P.solve(v)); };
    }
    const Eigen::VectorXd base = alpha;
    const Eigen::VectorXd r_base = r;
    auto Jv = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
      const double vn = v.norm();
      if (vn == 0.0) return Eigen::VectorXd::Zero(n);
      const double h = fd * std::max(1.0, base.norm()) / vn;
      return (R(base + h * v) - r_base) / h;
    };
    const GmresResult lin = gmres(Jv, M_inv, -r_base, 1e-6, cfg.krylov_restart, cfg.max_krylov);
    stats.krylov += lin.iterations;
    if (!lin.x.allFinite()) throw InstabilityError("Newton-Krylov direction is not finite");

    // Backtracking on the residual norm.
    const double r2 = r_base.norm();
    double lam = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 12; ++ls, lam *= 0.5) {
      const Eigen::VectorXd trial = base + lam * lin.x;
      const Eigen::VectorXd rt = R(trial);
      if (rt.norm() <= (1.0 - 1e-4 * lam) * r2) {
        alpha = trial;
        r = rt;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      throw SolverError("Newton-Krylov line search failed (residual " + std::to_string(inf_norm(r_base)) + ")");
    }
  }
  stats.evaluations = R.evaluations();
  return alpha;
}

DtController::DtController(double target, double dt_min, double dt_max)
    : target_(target), dt_min_(dt_min), dt_max_(dt_max) {
  if (!(target > 0.0) || !(dt_min > 0.0) || !(dt_max >= dt_min)) throw ConfigError("invalid adaptive time step limits");
}

double DtController::next(double dt, double displacement) {
  constexpr double kI = 0.6, kP = 0.2;
  const double ratio = displacement > 0.0 ? target_ / displacement : 1e3;
  double factor = std::pow(ratio, kI) * std::pow(ratio / prev_ratio_, kP);
  prev_ratio_ = ratio;
  factor = std::clamp(factor, 0.2, 1.5);
  return std::clamp(dt * factor, dt_min_, dt_max_);
}

double EnergyBalance::error() const { return std::abs(dE + visc + minus_pdiv + S); }

EnergyBalance energy_balance(const std::vector<DiagnosticsRecord>& records, double E0, double t0, double t1) {
  EnergyBalance b;
  double E_prev = E0;
  for (const auto& r : records) {
    if (r.t > t0 && r.t <= t1 + 1e-12) {
      b.dE += r.E - E_prev;
      b.visc += r.visc * r.dt;
      b.minus_pdiv -= r.pdiv * r.dt;
      b.S += r.S_term * r.dt;
    }
    E_prev = r.E;
  }
  return b;
}

}  // namespace rodfsi::fsi
