#pragma once

// The electrodynamics Hamiltonian on the dual 1-jet space E* = J^1*(T, M)
// and the geometry it induces: canonical nonlinear connection, adapted frame,
// Cartan connection, torsions and curvatures.
//
// Fields on E* are jets over every coordinate of E*: t1..tm, x1..xn, then the
// polymomenta p_i^a (variable m + n + i*m + a). Every field of the theory is at
// most quadratic in p, so jets of order >= 2 carry the p-dependence exactly.
//
// Slot layouts ("(S_,T^)" is a polymomentum pair):
//   p_i^a, A_(i)^(a)          (S_,T^)
//   N1^(f)_(r)b               (S_,T^),T_
//   N2^(f)_(r)j               (S_,T^),S_
//   Phi^(i)(j)_(a)(b)         (S^,T_),(S^,T_)
//   R^(f)_(r)ab / aj / ij     (S_,T^),T_,T_ / (S_,T^),T_,S_ / (S_,T^),S_,S_

#include <cstddef>
#include <vector>

#include "polyham/geometry.hpp"

namespace polyham {

// p[i][a] or v[i][a] (= v_a^i).
using Grid = std::vector<std::vector<double>>;

struct PhysicalConstants {
  double mass = 1.0;
  double charge = 0.0;
  double light_speed = 1.0;
};

class ElectrodynamicsModel {
 public:
  // `potential` is A_(i)^(a), row-major n x m. All expressions are declared over
  // coordinate_names(dims). Throws ModelError.
  ElectrodynamicsModel(Dims dims, PhysicalConstants k, MetricField h, MetricField phi,
                       std::vector<Expression> potential, Expression scalar_potential);

  Dims dims() const { return dims_; }
  const PhysicalConstants& constants() const { return k_; }
  double mass() const { return k_.mass; }
  double charge() const { return k_.charge; }
  double light_speed() const { return k_.light_speed; }
  const MetricField& h() const { return h_; }
  const MetricField& phi() const { return phi_; }
  const Expression& potential(std::size_t i, std::size_t a) const { return a_[i * dims_.m + a]; }
  const std::vector<Expression>& potential() const { return a_; }
  const Expression& scalar_potential() const { return p_; }

  ElectrodynamicsModel with_scalar_potential(Expression p) const;
  ElectrodynamicsModel with_charge(double e) const;

 private:
  Dims dims_;
  PhysicalConstants k_;
  MetricField h_;
  MetricField phi_;
  std::vector<Expression> a_;
  Expression p_;
};

std::size_t phase_dimension(Dims dims);
std::size_t momentum_variable(Dims dims, std::size_t i, std::size_t a);

// Everything the theory needs at one point of E*, as jets of the given order.
// N1 and N2 are available from order 1. Keeps a reference to the model.
class LocalModel {
 public:
  LocalModel(const ElectrodynamicsModel& model, const JetPoint& point, int order = 3);

  const ElectrodynamicsModel& model() const { return *model_; }
  Dims dims() const { return dims_; }
  const JetSpace& space() const { return *space_; }
  int order() const { return order_; }
  const JetPoint& point() const { return point_; }
  std::span<const Jet> coords() const { return base_.coords(); }

  const BaseGeometry& base() const { return base_; }
  const JetTensor& momenta() const { return momenta_; }
  const JetTensor& potential() const { return potential_; }
  const Jet& scalar_potential() const { return scalar_; }
  const JetTensor& n1() const { return n1_; }
  const JetTensor& n2() const { return n2_; }

  Jet hamiltonian() const;
  // Jet of an expression over (t, x).
  Jet evaluate(const Expression& e) const;

 private:
  const ElectrodynamicsModel* model_;
  Dims dims_;
  const JetSpace* space_;
  int order_;
  JetPoint point_;
  BaseGeometry base_;
  JetTensor momenta_;
  JetTensor potential_;
  Jet scalar_;
  JetTensor n1_;
  JetTensor n2_;
};

double lagrangian(const ElectrodynamicsModel& model, const BasePoint& point, const Grid& v);
Grid legendre_momenta(const ElectrodynamicsModel& model, const BasePoint& point, const Grid& v);
// Inverse Legendre map.
Grid velocities(const ElectrodynamicsModel& model, const BasePoint& point, const Grid& p);
double hamiltonian(const ElectrodynamicsModel& model, const JetPoint& point);

// (1/4mc) h_ab phi^ij, cross-checked against (1/2) d^2H/dp dp (ConsistencyFailure beyond 1e-10).
DTensor vertical_metric(const ElectrodynamicsModel& model, const BasePoint& point);

struct NonlinearConnection {
  DTensor n1;
  DTensor n2;
};
NonlinearConnection nonlinear_connection(const ElectrodynamicsModel& model, const JetPoint& point);

// One vector of the adapted frame: delta/delta t^a, delta/delta x^i or d/dp_i^a.
struct Direction {
  enum class Kind { temporal, spatial, momentum };
  Kind kind;
  std::size_t index;     // a, i, or i of p_i^a
  std::size_t pair = 0;  // a of p_i^a

  static Direction t(std::size_t a) { return {Kind::temporal, a, 0}; }
  static Direction x(std::size_t i) { return {Kind::spatial, i, 0}; }
  static Direction p(std::size_t i, std::size_t a) { return {Kind::momentum, i, a}; }
};

// Result order is one less than the field's (and capped by the connection's).
Jet adapted_derivative(const LocalModel& lm, const Jet& field, Direction d);

struct CartanConnection {
  DTensor h_temporal;  // chi^c_ab              T^,T_,T_
  DTensor a_mixed;     // A^i_jc = 0            S^,S_,T_
  DTensor h_spatial;   // gamma^i_jk            S^,S_,S_
  DTensor c_vertical;  // C^i(k)_j(c) = 0       S^,S_,(S^,T_)
};
CartanConnection cartan_connection(const ElectrodynamicsModel& model, const BasePoint& point);

struct TorsionJets {
  JetTensor r_tt;  // R^(f)_(r)ab
  JetTensor r_tx;  // R^(f)_(r)aj
  JetTensor r_xx;  // R^(f)_(r)ij
};
TorsionJets torsion_jets(const LocalModel& lm);

struct Torsions {
  DTensor r_tt;
  DTensor r_tx;
  DTensor r_xx;
};
Torsions torsions(const ElectrodynamicsModel& model, const JetPoint& point);

struct CartanCurvatures {
  DTensor temporal;    // H^d_abc = chi^d_abc                      T^,T_,T_,T_
  DTensor spatial;     // R^l_ijk                                  S^,S_,S_,S_
  DTensor vertical_t;  // R^(d)(i)_(l)(a)bc = -delta^i_l chi^d_abc  (S_,T^),(S^,T_),T_,T_
  DTensor vertical_x;  // R^(d)(l)_(i)(a)jk = delta^d_a R^l_ijk     (S_,T^),(S^,T_),S_,S_
};
CartanCurvatures cartan_curvatures(const ElectrodynamicsModel& model, const BasePoint& point);

// Covariant derivatives induced by the Cartan connection on d-tensor fields over E*.
//   horizontal_t ("/b"): delta/delta t^b, chi corrections on temporal slots; appends T_
//   horizontal_x ("|k"): delta/delta x^k, gamma corrections on spatial slots; appends S_
//   vertical: d/dp_j^b, no corrections; appends the pair (S^,T_)
// Pair slots are corrected through each half's own class.
enum class CovKind { horizontal_t, horizontal_x, vertical };
JetTensor dcov_deriv(const LocalModel& lm, const JetTensor& field, CovKind kind);

}  // namespace polyham
