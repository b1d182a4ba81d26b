#include "rodfsi/rod.hpp"

#include <cmath>
#include <sstream>
#include <type_traits>

namespace rodfsi::rod {

namespace {

struct QuadPoint {
  ShapeAt shape;
  double s;
  double weight;  // includes H/2
  int element;
  int index;  // qp index within element
};

// Calls f(QuadPoint) for every quadrature point of the rod.
template <class F>
void for_each_qp(int n_el, double S, const GaussRule& rule, F&& f) {
  const double H = S / n_el;
  const int nq = static_cast<int>(rule.points.size());
  for (int e = 0; e < n_el; ++e) {
    for (int k = 0; k < nq; ++k) {
      const double xi = rule.points[k];
      QuadPoint qp{shape_at_local(n_el, S, e, xi), e * H + 0.5 * (1.0 + xi) * H, 0.5 * H * rule.weights[k], e, k};
      f(qp);
    }
  }
}

void require_same_layout(const RodConfig& a, const RodConfig& b) {
  if (a.n_el() != b.n_el() || a.S() != b.S()) throw DomainError("rod configurations have different discretizations");
}

[[noreturn]] void throw_singular(double s, double b) {
  std::ostringstream msg;
  msg << "degenerate tangent |m'| = " << b << " at s = " << s;
  throw SingularConfiguration(msg.str());
}

double guarded_norm(const Vec2& dm, double s) {
  const double b = dm.norm();
  if (!(b >= kTangentGuard)) throw_singular(s, b);
  return b;
}

// Local rows of the B operator for the 8 element dofs.
struct LocalB {
  Eigen::Matrix<double, 8, 1> eps;
  Eigen::Matrix<double, 8, 1> kappa;
};

LocalB local_b(const ShapeAt& sa, const StrainOperator& op) {
  LocalB r;
  for (int j = 0; j < 8; ++j) {
    const int c = j % 2;
    const double w1 = sa.weight(1, j);
    const double w2 = sa.weight(2, j);
    r.eps[j] = op.eps_d1[c] * w1;
    r.kappa[j] = op.kappa_d1[c] * w1 + op.kappa_d2[c] * w2;
  }
  return r;
}

}  // namespace

double spontaneous_elongation(const ActuationProfile& a, double, double) {
  if (const auto* c = std::get_if<ConstantActuation>(&a)) return c->eps0;
  return 0.0;
}

double spontaneous_curvature(const ActuationProfile& a, double s, double t) {
  return std::visit(
      [&](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ConstantActuation>) {
          return p.kappa0;
        } else if constexpr (std::is_same_v<T, StepActuation>) {
          return t < p.t_switch ? p.kappa_before : p.kappa_after;
        } else if constexpr (std::is_same_v<T, TanhRampActuation>) {
          return p.amplitude * (1.0 + std::tanh(p.rate * s));
        } else {
          return p.amplitude * std::sin(p.wavenumber * (s - p.speed * t));
        }
      },
      a);
}

ReferenceConfig::ReferenceConfig(RodConfig q, int quad_points) : q_(std::move(q)), rule_(gauss_legendre(quad_points)) {
  const std::size_t n = static_cast<std::size_t>(q_.n_el()) * rule_.points.size();
  stretch_.resize(n);
  curvature_.resize(n);
  for_each_qp(q_.n_el(), q_.S(), rule_, [&](const QuadPoint& qp) {
    const Vec2 dm = qp.shape.apply(q_.dofs(), 1);
    const Vec2 ddm = qp.shape.apply(q_.dofs(), 2);
    const Strains st = strains_at(dm, ddm, 0.0, 0.0, 0.0, 0.0);
    const std::size_t i = qp.element * rule_.points.size() + qp.index;
    stretch_[i] = st.eps;
    curvature_[i] = st.kappa;
  });
}

std::pair<double, double> ReferenceConfig::measures_at(double s) const {
  const Strains st = strains_at(q_.eval(s, 1), q_.eval(s, 2), 0.0, 0.0, 0.0, 0.0);
  return {st.eps, st.kappa};
}

Strains strains_at(const Vec2& dm, const Vec2& ddm, double ref_stretch, double ref_curv, double eps0, double kappa0) {
  const double b = dm.norm();
  if (!(b >= kTangentGuard)) throw_singular(std::nan(""), b);
  const double c = cross(dm, ddm);  // (J m').m''
  return {b - ref_stretch - eps0, -c / (b * b) - ref_curv - kappa0};
}

StrainOperator strain_operator(const Vec2& dm, const Vec2& ddm) {
  const double b = dm.norm();
  if (!(b >= kTangentGuard)) throw_singular(std::nan(""), b);
  const Vec2 t = dm / b;
  const Vec2 n = perp(t);
  StrainOperator op;
  op.eps_d1 = t;
  op.kappa_d1 = (2.0 * ddm.dot(n) * t + perp(ddm)) / (b * b);
  op.kappa_d2 = -n / b;
  return op;
}

Strains strain_second_variation(const Vec2& dm, const Vec2& ddm, const Vec2& a1, const Vec2& a2, const Vec2& b1,
                                const Vec2& b2) {
  const Vec2& u = dm;
  const Vec2& w = ddm;
  const double bb = u.squaredNorm();
  const double b = std::sqrt(bb);
  if (!(b >= kTangentGuard)) throw_singular(std::nan(""), b);
  const Vec2 t = u / b;

  Strains r;
  r.eps = (a1.dot(b1) - t.dot(a1) * t.dot(b1)) / b;

  const double c = cross(u, w);
  const double ua = u.dot(a1);
  const double ub = u.dot(b1);
  const double dc_a = cross(a1, w) + cross(u, a2);
  const double dc_b = cross(b1, w) + cross(u, b2);
  const double ddc = cross(a1, b2) + cross(b1, a2);
  r.kappa = -ddc / bb + 2.0 * dc_a * ub / (bb * bb) + 2.0 * dc_b * ua / (bb * bb) + 2.0 * c * a1.dot(b1) / (bb * bb) -
            8.0 * c * ua * ub / (bb * bb * bb);
  return r;
}

Strains strains(const RodConfig& q, const ReferenceConfig& ref, const ElasticLaw& law, double s, double t) {
  const Vec2 dm = q.eval(s, 1);
  guarded_norm(dm, s);
  const auto [rs, rk] = ref.measures_at(s);
  return strains_at(dm, q.eval(s, 2), rs, rk, spontaneous_elongation(law.actuation, s, t),
                    spontaneous_curvature(law.actuation, s, t));
}

Strains strain_variations(const RodConfig& q, double s, const RodConfig& delta_q) {
  require_same_layout(q, delta_q);
  const ShapeAt sa = shape_at(q.n_el(), q.S(), s);
  const Vec2 dm = sa.apply(q.dofs(), 1);
  guarded_norm(dm, s);
  const StrainOperator op = strain_operator(dm, sa.apply(q.dofs(), 2));
  const Vec2 d1 = sa.apply(delta_q.dofs(), 1);
  const Vec2 d2 = sa.apply(delta_q.dofs(), 2);
  return {op.eps_d1.dot(d1), op.kappa_d1.dot(d1) + op.kappa_d2.dot(d2)};
}

namespace {

// Strains at a quadrature point using the cached reference measures.
Strains qp_strains(const RodConfig& q, const ReferenceConfig& ref, const ElasticLaw& law, double t,
                   const QuadPoint& qp, Vec2& dm, Vec2& ddm) {
  dm = qp.shape.apply(q.dofs(), 1);
  ddm = qp.shape.apply(q.dofs(), 2);
  guarded_norm(dm, qp.s);
  return strains_at(dm, ddm, ref.stretch(qp.element, qp.index), ref.curvature(qp.element, qp.index),
                    spontaneous_elongation(law.actuation, qp.s, t), spontaneous_curvature(law.actuation, qp.s, t));
}

void require_ref(const RodConfig& q, const ReferenceConfig& ref) { require_same_layout(q, ref.config()); }

}  // namespace

double elastic_energy(const RodConfig& q, const ReferenceConfig& ref, const ElasticLaw& law, double t) {
  require_ref(q, ref);
  double E = 0.0;
  Vec2 dm, ddm;
  for_each_qp(q.n_el(), q.S(), ref.rule(), [&](const QuadPoint& qp) {
    const Strains st = qp_strains(q, ref, law, t, qp, dm, ddm);
    E += 0.5 * qp.weight * (law.C_eps * st.eps * st.eps + law.C_kappa * st.kappa * st.kappa);
  });
  return E;
}

Eigen::VectorXd energy_gradient(const RodConfig& q, const ReferenceConfig& ref, const ElasticLaw& law, double t) {
  require_ref(q, ref);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(q.n_dofs());
  Vec2 dm, ddm;
  for_each_qp(q.n_el(), q.S(), ref.rule(), [&](const QuadPoint& qp) {
    const Strains st = qp_strains(q, ref, law, t, qp, dm, ddm);
    const LocalB B = local_b(qp.shape, strain_operator(dm, ddm));
    const auto local = (qp.weight * (law.C_eps * st.eps * B.eps + law.C_kappa * st.kappa * B.kappa)).eval();
    g.segment<8>(4 * qp.element) += local;
  });
  return g;
}

double energy_gradient(const RodConfig& q, const ReferenceConfig& ref, const ElasticLaw& law, double t,
                       const RodConfig& delta_q) {
  require_same_layout(q, delta_q);
  return energy_gradient(q, ref, law, t).dot(delta_q.dofs());
}

Eigen::MatrixXd material_stiffness(const RodConfig& q, const ReferenceConfig& ref, const ElasticLaw& law) {
  require_ref(q, ref);
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(q.n_dofs(), q.n_dofs());
  for_each_qp(q.n_el(), q.S(), ref.rule(), [&](const QuadPoint& qp) {
    const Vec2 dm = qp.shape.apply(q.dofs(), 1);
    guarded_norm(dm, qp.s);
    const LocalB B = local_b(qp.shape, strain_operator(dm, qp.shape.apply(q.dofs(), 2)));
    K.block<8, 8>(4 * qp.element, 4 * qp.element) +=
        qp.weight * (law.C_eps * B.eps * B.eps.transpose() + law.C_kappa * B.kappa * B.kappa.transpose());
  });
  return K;
}

double material_stiffness_form(const RodConfig& q, const ReferenceConfig& ref, const ElasticLaw& law,
                               const RodConfig& p, const RodConfig& delta_q) {
  require_ref(q, ref);
  require_same_layout(q, p);
  require_same_layout(q, delta_q);
  double acc = 0.0;
  for_each_qp(q.n_el(), q.S(), ref.rule(), [&](const QuadPoint& qp) {
    const Vec2 dm = qp.shape.apply(q.dofs(), 1);
    guarded_norm(dm, qp.s);
    const StrainOperator op = strain_operator(dm, qp.shape.apply(q.dofs(), 2));
    const Vec2 p1 = qp.shape.apply(p.dofs(), 1), p2 = qp.shape.apply(p.dofs(), 2);
    const Vec2 d1 = qp.shape.apply(delta_q.dofs(), 1), d2 = qp.shape.apply(delta_q.dofs(), 2);
    const double pe = op.eps_d1.dot(p1), pk = op.kappa_d1.dot(p1) + op.kappa_d2.dot(p2);
    const double de = op.eps_d1.dot(d1), dk = op.kappa_d1.dot(d1) + op.kappa_d2.dot(d2);
    acc += qp.weight * (law.C_eps * pe * de + law.C_kappa * pk * dk);
  });
  return acc;
}

Eigen::MatrixXd geometric_stiffness(const RodConfig& q, const ReferenceConfig& ref, const ElasticLaw& law, double t) {
  require_ref(q, ref);
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(q.n_dofs(), q.n_dofs());
  Vec2 dm, ddm;
  for_each_qp(q.n_el(), q.S(), ref.rule(), [&](const QuadPoint& qp) {
    const Strains st = qp_strains(q, ref, law, t, qp, dm, ddm);
    const double se = qp.weight * law.C_eps * st.eps;
    const double sk = qp.weight * law.C_kappa * st.kappa;
    for (int i = 0; i < 8; ++i) {
      Vec2 a1 = Vec2::Zero(), a2 = Vec2::Zero();
      a1[i % 2] = qp.shape.weight(1, i);
      a2[i % 2] = qp.shape.weight(2, i);
      for (int j = i; j < 8; ++j) {
        Vec2 b1 = Vec2::Zero(), b2 = Vec2::Zero();
        b1[j % 2] = qp.shape.weight(1, j);
        b2[j % 2] = qp.shape.weight(2, j);
        const Strains dd = strain_second_variation(dm, ddm, a1, a2, b1, b2);
        const double v = se * dd.eps + sk * dd.kappa;
        K(4 * qp.element + i, 4 * qp.element + j) += v;
        if (j != i) K(4 * qp.element + j, 4 * qp.element + i) += v;
      }
    }
  });
  return K;
}

double geometric_stiffness_action(const RodConfig& q, const ReferenceConfig& ref, const ElasticLaw& law, double t,
                                  const RodConfig& dq, const RodConfig& delta_q) {
  require_ref(q, ref);
  require_same_layout(q, dq);
  require_same_layout(q, delta_q);
  double acc = 0.0;
  Vec2 dm, ddm;
  for_each_qp(q.n_el(), q.S(), ref.rule(), [&](const QuadPoint& qp) {
    const Strains st = qp_strains(q, ref, law, t, qp, dm, ddm);
    const Strains dd = strain_second_variation(dm, ddm, qp.shape.apply(dq.dofs(), 1), qp.shape.apply(dq.dofs(), 2),
                                               qp.shape.apply(delta_q.dofs(), 1), qp.shape.apply(delta_q.dofs(), 2));
    acc += qp.weight * (law.C_eps * st.eps * dd.eps + law.C_kappa * st.kappa * dd.kappa);
  });
  return acc;
}

Eigen::VectorXd external_force(const ExternalLoad& load, int n_el, double S, double t, int quad_points) {
  Eigen::VectorXd F = Eigen::VectorXd::Zero(4 * (n_el + 1));
  if (load.is_zero()) return F;
  for_each_qp(n_el, S, gauss_legendre(quad_points), [&](const QuadPoint& qp) {
    const Vec2 f0 = load.f0 ? load.f0(qp.s, t) : Vec2::Zero();
    const Vec2 f1 = load.f1 ? load.f1(qp.s, t) : Vec2::Zero();
    for (int j = 0; j < 8; ++j) {
      const int c = j % 2;
      F[4 * qp.element + j] += qp.weight * (f0[c] * qp.shape.weight(0, j) + f1[c] * qp.shape.weight(1, j));
    }
  });
  return F;
}

double external_force_work(const ExternalLoad& load, double t, const RodConfig& delta_q, int quad_points) {
  return external_force(load, delta_q.n_el(), delta_q.S(), t, quad_points).dot(delta_q.dofs());
}

void check_regular(const RodConfig& q, int quad_points) {
  for_each_qp(q.n_el(), q.S(), gauss_legendre(quad_points),
              [&](const QuadPoint& qp) { guarded_norm(qp.shape.apply(q.dofs(), 1), qp.s); });
}

}  // namespace rodfsi::rod
