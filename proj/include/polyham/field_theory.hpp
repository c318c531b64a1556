#pragma once

// Field-like objects built on the Cartan connection: deflection tensors, the
// polymomentum electromagnetic form and its Maxwell-like identities, the
// gravitational h*-potential, Einstein-like blocks and conservation laws.
//
// Slot layouts:
//   Delta^(i)_(a)b           (S^,T_),T_
//   Delta^(i)_(a)j, F        (S^,T_),S_
//   theta^(i)(j)_(a)(b), f   (S^,T_),(S^,T_)

#include <string>
#include <utility>
#include <vector>

#include "polyham/hamilton.hpp"

namespace polyham {

// Largest residual component and the largest magnitude among the terms it came from.
struct Residual {
  double max_abs = 0.0;
  double scale = 0.0;
  double relative() const { return scale > 0.0 ? max_abs / scale : max_abs; }
};

struct DeflectionJets {
  JetTensor delta_t;
  JetTensor delta_x;
  JetTensor theta;
};

// h*_af phi^ir p_r^f, the field whose covariant derivatives are the deflections.
JetTensor liouville_field(const LocalModel& lm);
DeflectionJets deflections_closed(const LocalModel& lm);
DeflectionJets deflections_covariant(const LocalModel& lm);

struct Deflections {
  DTensor delta_t;
  DTensor delta_x;
  DTensor theta;
};

struct DeflectionReport {
  Deflections closed;
  Deflections covariant;
  Residual residual;
};

// Throws ConsistencyFailure when the two routes differ by more than 1e-9 (relative, floor 1).
DeflectionReport deflection_tensors(const ElectrodynamicsModel& model, const JetPoint& point);

struct ElectromagneticJets {
  JetTensor big_f;
  JetTensor small_f;
};
ElectromagneticJets electromagnetic_jets(const LocalModel& lm);

struct ElectromagneticForm {
  DTensor big_f;    // F^(i)_(a)j = (Delta^(i)_(a)j - Delta^(j)_(a)i) / 2
  DTensor small_f;  // f = (theta^(i)(j) - theta^(j)(i)) / 2, identically zero
};
ElectromagneticForm electromagnetic_form(const ElectrodynamicsModel& model, const BasePoint& point);

struct MaxwellResiduals {
  DTensor res1;  // F_/b - RHS1                     (S^,T_),S_,T_
  DTensor res2;  // cyc F_|k - RHS2                 (S^,T_),S_,S_
  DTensor res3;  // cyc F|^(k)_(c)                  (S^,T_),S_,(S^,T_)
  Residual r1, r2, r3;
};
MaxwellResiduals maxwell_residuals(const LocalModel& lm);
MaxwellResiduals maxwell_residuals(const ElectrodynamicsModel& model, const JetPoint& point);

struct GravPotential {
  DTensor temporal;  // h*_ab = h_ab / 4mc
  DTensor spatial;   // phi_ij
  DTensor vertical;  // h*_ab phi^ij
};
GravPotential gravitational_potential(const ElectrodynamicsModel& model, const BasePoint& point);

struct EinsteinBlocks {
  DTensor t_tt;        // T_ab
  DTensor t_xx;        // T_ij
  DTensor t_vertical;  // T^(i)(j)_(a)(b)
  std::vector<std::pair<std::string, DTensor>> zero_blocks;
  double k = 1.0;
  double scalar = 0.0;  // Sc = 4mc chi + R
};
// Throws ZeroEinsteinConstant when k == 0.
EinsteinBlocks stress_energy(const ElectrodynamicsModel& model, const BasePoint& point, double k = 1.0);

// Sc recomputed as G^AB Ric_AB over the full adapted metric, next to 4mc chi + R
// from the two base metrics.
struct ScalarDecomposition {
  double recomputed = 0.0;
  double decomposed = 0.0;
};
ScalarDecomposition cartan_scalar_curvature(const ElectrodynamicsModel& model, const BasePoint& point);

struct ConservationResiduals {
  std::vector<double> res_t;  // [4mc chi^f_b - Sc/2 delta^f_b]_/f, per b
  std::vector<double> res_m;  // [R^r_j - Sc/2 delta^r_j]_|r, per j
  Residual t, m;
};
ConservationResiduals conservation_residuals(const ElectrodynamicsModel& model, const BasePoint& point);

}  // namespace polyham
