#pragma once
//
// Planar non-shearable rod discretized with C1 cubic Hermite elements.
//
// A configuration m(s), s in [0,S], is stored as nodal (m1, m2, m1', m2')
// quadruples on a uniform grid of N_el elements. On element e the field is
//
//   m(s) = N_m^-(xi) m_e + H/2 N_t^-(xi) m'_e + N_m^+(xi) m_{e+1} + H/2 N_t^+(xi) m'_{e+1}
//
// with s = s_e (1-xi)/2 + s_{e+1} (1+xi)/2. Keeping the H/2 factor in the
// shape functions (not in the dofs) makes the tangent dofs equal to m'(s)
// at the nodes, and requires a uniform element length.
//
// Energy:  E = 1/2 int (C_eps eps^2 + C_kappa kappa^2) ds with
//   eps   = t.m' - T.M' - eps0(s,t)
//   kappa = -n.m''/|m'| - (T.N') - kappa0(s,t),   t = m'/|m'|,  n = J t.
//
#include "rodfsi/common.hpp"

#include <array>
#include <functional>
#include <variant>
#include <vector>

namespace rodfsi::rod {

// Values (order 0) or xi-derivatives (order 1, 2) of the four cubic
// Hermite polynomials (N_m^-, N_t^-, N_m^+, N_t^+) at xi in [-1,1].
std::array<double, 4> hermite_basis(double xi, int order);

// Gauss-Legendre rule on [-1,1]; 1 to 5 points.
struct GaussRule {
  std::vector<double> points;
  std::vector<double> weights;
};
GaussRule gauss_legendre(int n);

enum class DofKind { Position = 0, Tangent = 1 };

class RodConfig {
 public:
  RodConfig() = default;
  RodConfig(int n_el, double S);

  // Nodal interpolant of a smooth curve given m and m'.
  static RodConfig interpolate(int n_el, double S, const std::function<Vec2(double)>& m,
                               const std::function<Vec2(double)>& dm);
  // Straight rod m(s) = origin + s * (L/S) e1.
  static RodConfig straight(int n_el, double S, const Vec2& origin, double length);

  int n_el() const { return n_el_; }
  int n_nodes() const { return n_el_ + 1; }
  int n_dofs() const { return 4 * (n_el_ + 1); }
  double S() const { return S_; }
  double H() const { return S_ / n_el_; }

  static int dof_index(int node, DofKind kind, int comp) { return 4 * node + 2 * static_cast<int>(kind) + comp; }

  Eigen::VectorXd& dofs() { return dofs_; }
  const Eigen::VectorXd& dofs() const { return dofs_; }

  Vec2 position(int node) const { return dofs_.segment<2>(4 * node); }
  Vec2 tangent(int node) const { return dofs_.segment<2>(4 * node + 2); }
  void set_node(int node, const Vec2& m, const Vec2& dm);

  // m(s), m'(s) or m''(s). Throws DomainError outside [0,S].
  Vec2 eval(double s, int order) const;

  RodConfig& operator+=(const RodConfig& o);

 private:
  int n_el_ = 0;
  double S_ = 1.0;
  Eigen::VectorXd dofs_;
};

// Per-point shape data in s-derivatives: w[k][b] multiplies local block b
// (m_e, m'_e, m_{e+1}, m'_{e+1}) for derivative order k.
struct ShapeAt {
  int element = 0;
  std::array<std::array<double, 4>, 3> w{};

  // Local dof j in [0,8) of the element maps to global 4*element + j.
  int global_dof(int local) const { return 4 * element + local; }
  // Scalar weight of local dof j for order k (component is local % 2).
  double weight(int order, int local) const { return w[order][local / 2]; }
  Vec2 apply(const Eigen::VectorXd& dofs, int order) const;
};

ShapeAt shape_at(int n_el, double S, double s);
ShapeAt shape_at_local(int n_el, double S, int element, double xi);

// Spontaneous elongation and curvature presets.
struct ConstantActuation {
  double eps0 = 0.0;
  double kappa0 = 0.0;
  bool operator==(const ConstantActuation&) const = default;
};
// kappa0 = before for t < t_switch, after otherwise.
struct StepActuation {
  double kappa_before = 0.0;
  double kappa_after = 0.0;
  double t_switch = 0.0;
  bool operator==(const StepActuation&) const = default;
};
// kappa0(s) = amplitude (1 + tanh(rate s)).
struct TanhRampActuation {
  double amplitude = 0.0;
  double rate = 0.0;
  bool operator==(const TanhRampActuation&) const = default;
};
// kappa0(s,t) = amplitude sin(wavenumber (s - speed t)).
struct TravelingWaveActuation {
  double amplitude = 0.0;
  double wavenumber = 0.0;
  double speed = 0.0;
  bool operator==(const TravelingWaveActuation&) const = default;
};
using ActuationProfile = std::variant<ConstantActuation, StepActuation, TanhRampActuation, TravelingWaveActuation>;

double spontaneous_elongation(const ActuationProfile& a, double s, double t);
double spontaneous_curvature(const ActuationProfile& a, double s, double t);

struct ElasticLaw {
  double C_eps = 1.0;
  double C_kappa = 1.0;
  ActuationProfile actuation = ConstantActuation{};
  bool operator==(const ElasticLaw&) const = default;
};

// Distributed force f0 (per unit length, work against dm) and f1 (work
// against dm'). Empty functions are zero.
struct ExternalLoad {
  std::function<Vec2(double, double)> f0;
  std::function<Vec2(double, double)> f1;
  bool is_zero() const { return !f0 && !f1; }
};

// Reference configuration with the reference strain measures T.M' and T.N'
// cached at the quadrature points of every element.
class ReferenceConfig {
 public:
  ReferenceConfig() = default;
  ReferenceConfig(RodConfig q, int quad_points = 4);

  const RodConfig& config() const { return q_; }
  const GaussRule& rule() const { return rule_; }
  // Reference stretch T.M' and curvature T.N' at (element, qp).
  double stretch(int e, int qp) const { return stretch_[e * rule_.points.size() + qp]; }
  double curvature(int e, int qp) const { return curvature_[e * rule_.points.size() + qp]; }
  // Same at an arbitrary s.
  std::pair<double, double> measures_at(double s) const;

 private:
  RodConfig q_;
  GaussRule rule_;
  std::vector<double> stretch_;
  std::vector<double> curvature_;
};

struct Strains {
  double eps = 0.0;
  double kappa = 0.0;
};

// Below this |m'| the configuration is treated as singular.
inline constexpr double kTangentGuard = 1e-10;

// Pointwise kernels in terms of (m', m'').
Strains strains_at(const Vec2& dm, const Vec2& ddm, double ref_stretch, double ref_curv, double eps0, double kappa0);

// Rows of the linearized strain operator B: deps = Be1.dm'; dkappa = Bk1.dm' + Bk2.dm''.
struct StrainOperator {
  Vec2 eps_d1;
  Vec2 kappa_d1;
  Vec2 kappa_d2;
};
StrainOperator strain_operator(const Vec2& dm, const Vec2& ddm);

// Second variation of (eps, kappa) along (a, b), where a = (a', a'') and b = (b', b'').
Strains strain_second_variation(const Vec2& dm, const Vec2& ddm, const Vec2& a1, const Vec2& a2, const Vec2& b1,
                                const Vec2& b2);

Strains strains(const RodConfig& q, const ReferenceConfig& ref, const ElasticLaw& law, double s, double t);
Strains strain_variations(const RodConfig& q, double s, const RodConfig& delta_q);

double elastic_energy(const RodConfig& q, const ReferenceConfig& ref, const ElasticLaw& law, double t);

// Vector of <D_q E, N^i> over all dofs.
Eigen::VectorXd energy_gradient(const RodConfig& q, const ReferenceConfig& ref, const ElasticLaw& law, double t);
double energy_gradient(const RodConfig& q, const ReferenceConfig& ref, const ElasticLaw& law, double t,
                       const RodConfig& delta_q);

// int (B dq) . C (B p) ds, assembled as a dense symmetric matrix.
Eigen::MatrixXd material_stiffness(const RodConfig& q, const ReferenceConfig& ref, const ElasticLaw& law);
double material_stiffness_form(const RodConfig& q, const ReferenceConfig& ref, const ElasticLaw& law,
                               const RodConfig& p, const RodConfig& delta_q);

// Stress-dependent part of the second variation of E.
Eigen::MatrixXd geometric_stiffness(const RodConfig& q, const ReferenceConfig& ref, const ElasticLaw& law, double t);
double geometric_stiffness_action(const RodConfig& q, const ReferenceConfig& ref, const ElasticLaw& law, double t,
                                  const RodConfig& dq, const RodConfig& delta_q);

Eigen::VectorXd external_force(const ExternalLoad& load, int n_el, double S, double t, int quad_points = 4);
double external_force_work(const ExternalLoad& load, double t, const RodConfig& delta_q, int quad_points = 4);

// Throws SingularConfiguration if |m'| < kTangentGuard at any quadrature point.
void check_regular(const RodConfig& q, int quad_points = 4);

}  // namespace rodfsi::rod
