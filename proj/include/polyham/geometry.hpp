#pragma once

// Levi-Civita geometry of the temporal metric h_ab(t) and the spatial metric
// phi_ij(x), evaluated pointwise as Taylor jets.
//
// Curvature convention (shared by every module):
//   R^l_ijk = d_k G^l_ij - d_j G^l_ik + G^s_ij G^l_sk - G^s_ik G^l_sj
//   Ric_ij  = R^k_ijk  (upper index contracted with the last lower index)
// With it the unit 2-sphere has Ric = g and scalar curvature +2.

#include <span>
#include <string>
#include <vector>

#include "polyham/dtensor.hpp"
#include "polyham/expr.hpp"

namespace polyham {

// Coordinate names t1..tm, x1..xn in declaration order.
std::vector<std::string> coordinate_names(Dims dims);

struct BasePoint {
  std::vector<double> t;
  std::vector<double> x;
};

// Jets of every coordinate (t first, then x) at the point; missing values read as 0.
std::vector<Jet> coordinate_jets(Dims dims, const BasePoint& point, int order);

class MetricField {
 public:
  // `entries` is row-major dim x dim, each expression declared over coordinate_names(dims).
  MetricField(IndexClass cls, Dims dims, std::vector<Expression> entries);

  IndexClass cls() const { return cls_; }
  Dims dims() const { return dims_; }
  std::size_t dim() const { return dims_.extent(cls_); }
  std::size_t offset() const { return cls_ == IndexClass::temporal ? 0 : dims_.m; }
  const Expression& entry(std::size_t i, std::size_t j) const { return entries_[i * dim() + j]; }

  // g_ij as a jet tensor with two lower slots; reads the first m+n coordinate jets.
  JetTensor evaluate(std::span<const Jet> coords) const;

 private:
  IndexClass cls_;
  Dims dims_;
  std::vector<Expression> entries_;
};

// Tensor-valued field over (t, x) given componentwise by expressions.
struct TensorField {
  std::vector<IndexSlot> slots;
  Dims dims;
  std::vector<Expression> components;  // row-major over the slots

  JetTensor evaluate(std::span<const Jet> coords) const;
};

// Every Levi-Civita object of one metric at one point. With input order K the
// metric and inverse carry order K, Christoffel K-1, curvature objects K-2.
struct MetricGeometry {
  IndexClass cls;
  std::size_t offset;  // index of the first coordinate of this class
  JetTensor metric;
  JetTensor inverse;
  JetTensor christoffel;  // G^k_ij
  JetTensor riemann;      // R^l_ijk (empty when K < 2)
  JetTensor ricci;        // R_ij
  Jet scalar;
};

MetricGeometry metric_geometry(const MetricField& g, std::span<const Jet> coords);

// Both metrics at a base point (t, x), sharing one jet space.
class BaseGeometry {
 public:
  BaseGeometry(const MetricField& h, const MetricField& phi, const BasePoint& point, int order = 3);
  // Uses the given coordinate jets (t, x first; further variables such as p may follow).
  BaseGeometry(const MetricField& h, const MetricField& phi, std::vector<Jet> coords);

  Dims dims() const { return dims_; }
  const JetSpace& space() const { return *space_; }
  int order() const { return order_; }
  std::span<const Jet> coords() const { return coords_; }
  const MetricGeometry& temporal() const { return temporal_; }
  const MetricGeometry& spatial() const { return spatial_; }
  const MetricGeometry& of(IndexClass c) const {
    return c == IndexClass::temporal ? temporal_ : spatial_;
  }

 private:
  Dims dims_;
  const JetSpace* space_;
  int order_;
  std::vector<Jet> coords_;
  MetricGeometry temporal_;
  MetricGeometry spatial_;
};

struct ConnectionCoeffs {
  IndexClass cls;
  DTensor gamma;  // G^k_ij: upper, lower, lower
};

struct RicciScalar {
  DTensor ricci;
  double scalar;
};

ConnectionCoeffs christoffel(const MetricField& g, const BasePoint& point);
DTensor riemann_curvature(const MetricField& g, const BasePoint& point);
RicciScalar ricci_and_scalar(const MetricField& g, const BasePoint& point);

// Levi-Civita derivative acting on the slots of g.cls only; appends a lower slot
// of that class: d_c T + G corrections (+ per upper slot, - per lower slot).
JetTensor levi_civita_derivative(const JetTensor& field, const MetricGeometry& g);

// T-generalized (";a") and M-generalized (":k") covariant derivatives.
JetTensor cov_deriv_T(const JetTensor& field, const BaseGeometry& geo);
JetTensor cov_deriv_M(const JetTensor& field, const BaseGeometry& geo);

// Max-norm of the divergence (Ric^r_j - Sc/2 delta^r_j)_{;r}.
double bianchi_residual(const MetricField& g, const BasePoint& point);

}  // namespace polyham
