#include "polyham/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "polyham/errors.hpp"

namespace polyham {

std::vector<std::string> coordinate_names(Dims dims) {
  std::vector<std::string> names;
  for (std::size_t a = 1; a <= dims.m; ++a) names.push_back("t" + std::to_string(a));
  for (std::size_t i = 1; i <= dims.n; ++i) names.push_back("x" + std::to_string(i));
  return names;
}

std::vector<Jet> coordinate_jets(Dims dims, const BasePoint& point, int order) {
  const JetSpace& space = JetSpace::get(dims.m + dims.n, order);
  std::vector<Jet> out;
  for (std::size_t a = 0; a < dims.m; ++a)
    out.push_back(Jet::variable(space, a, a < point.t.size() ? point.t[a] : 0.0, order));
  for (std::size_t i = 0; i < dims.n; ++i)
    out.push_back(Jet::variable(space, dims.m + i, i < point.x.size() ? point.x[i] : 0.0, order));
  return out;
}

MetricField::MetricField(IndexClass cls, Dims dims, std::vector<Expression> entries)
    : cls_(cls), dims_(dims), entries_(std::move(entries)) {
  if (entries_.size() != dim() * dim()) throw ModelError("metric entry grid has the wrong size");
  const auto names = coordinate_names(dims);
  for (const auto& e : entries_) {
    if (e.variables() != names) throw ModelError("metric entries must be declared over t1..tm, x1..xn");
    const std::size_t other_begin = cls == IndexClass::temporal ? dims.m : 0;
    const std::size_t other_end = cls == IndexClass::temporal ? dims.m + dims.n : dims.m;
    for (std::size_t v = other_begin; v < other_end; ++v)
      if (e.uses(v))
        throw ModelError(std::string(cls == IndexClass::temporal ? "temporal" : "spatial") +
                         " metric entry '" + e.source() + "' depends on " + names[v]);
  }
}

JetTensor MetricField::evaluate(std::span<const Jet> coords) const {
  const IndexSlot lo{cls_, Variance::lower, false};
  JetTensor g({lo, lo}, dims_, coords[0]);
  const auto base = coords.first(dims_.m + dims_.n);
  for (std::size_t f = 0; f < entries_.size(); ++f) g[f] = entries_[f].eval(base);
  return g;
}

JetTensor TensorField::evaluate(std::span<const Jet> coords) const {
  JetTensor out(slots, dims, coords[0]);
  if (components.size() != out.size()) throw SlotMismatch("tensor field component count");
  const auto base = coords.first(dims.m + dims.n);
  for (std::size_t f = 0; f < out.size(); ++f) out[f] = components[f].eval(base);
  return out;
}

MetricGeometry metric_geometry(const MetricField& field, std::span<const Jet> coords) {
  MetricGeometry g;
  g.cls = field.cls();
  g.offset = field.offset();
  const std::size_t d = field.dim();
  const IndexSlot up{g.cls, Variance::upper, false};
  const IndexSlot lo{g.cls, Variance::lower, false};
  const JetSpace& space = coords[0].space();
  const int order = coords[0].order();

  g.metric = field.evaluate(coords);
  g.inverse = invert_metric(g.metric);
  if (order < 1) return g;

  // First kind: G_rij = (d_i g_rj + d_j g_ri - d_r g_ij) / 2.
  std::vector<JetTensor> dg;
  for (std::size_t c = 0; c < d; ++c) {
    JetTensor t({lo, lo}, field.dims(), Jet::constant(space, 0.0, order - 1));
    for (std::size_t f = 0; f < t.size(); ++f) t[f] = g.metric[f].derivative(g.offset + c);
    dg.push_back(std::move(t));
  }
  const Jet zero1 = Jet::constant(space, 0.0, order - 1);
  JetTensor first({lo, lo, lo}, field.dims(), zero1);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        first.at({r, i, j}) =
            (dg[i].at({r, j}) + dg[j].at({r, i}) - dg[r].at({i, j})) * 0.5;
  g.christoffel = JetTensor({up, lo, lo}, field.dims(), zero1);
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i; j < d; ++j) {
        Jet acc = zero1;
        for (std::size_t r = 0; r < d; ++r) acc += g.inverse.at({k, r}) * first.at({r, i, j});
        g.christoffel.at({k, i, j}) = acc;
        g.christoffel.at({k, j, i}) = acc;
      }
  if (order < 2) return g;

  const auto& G = g.christoffel;
  const Jet zero2 = Jet::constant(space, 0.0, order - 2);
  g.riemann = JetTensor({up, lo, lo, lo}, field.dims(), zero2);
  for (std::size_t l = 0; l < d; ++l)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = j + 1; k < d; ++k) {
          Jet r = G.at({l, i, j}).derivative(g.offset + k) - G.at({l, i, k}).derivative(g.offset + j);
          for (std::size_t s = 0; s < d; ++s)
            r += G.at({s, i, j}) * G.at({l, s, k}) - G.at({s, i, k}) * G.at({l, s, j});
          g.riemann.at({l, i, j, k}) = r;
          g.riemann.at({l, i, k, j}) = -r;
        }
  g.ricci = contract(g.riemann, 0, 3);
  g.scalar = zero2;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) g.scalar += g.inverse.at({i, j}) * g.ricci.at({i, j});
  return g;
}

BaseGeometry::BaseGeometry(const MetricField& h, const MetricField& phi, const BasePoint& point,
                           int order)
    : dims_(h.dims()), space_(&JetSpace::get(h.dims().m + h.dims().n, order)), order_(order) {
  if (h.cls() != IndexClass::temporal || phi.cls() != IndexClass::spatial || !(h.dims() == phi.dims()))
    throw ModelError("base geometry needs a temporal and a spatial metric of matching dims");
  coords_ = coordinate_jets(dims_, point, order);
  temporal_ = metric_geometry(h, coords_);
  spatial_ = metric_geometry(phi, coords_);
}

BaseGeometry::BaseGeometry(const MetricField& h, const MetricField& phi, std::vector<Jet> coords)
    : dims_(h.dims()), space_(&coords.at(0).space()), order_(coords[0].order()), coords_(std::move(coords)) {
  if (h.cls() != IndexClass::temporal || phi.cls() != IndexClass::spatial || !(h.dims() == phi.dims()))
    throw ModelError("base geometry needs a temporal and a spatial metric of matching dims");
  if (coords_.size() < dims_.m + dims_.n) throw ModelError("too few coordinate jets");
  temporal_ = metric_geometry(h, coords_);
  spatial_ = metric_geometry(phi, coords_);
}

namespace {

std::vector<Jet> single_metric_coords(const MetricField& g, const BasePoint& point, int order) {
  return coordinate_jets(g.dims(), point, order);
}

}  // namespace

ConnectionCoeffs christoffel(const MetricField& g, const BasePoint& point) {
  auto coords = single_metric_coords(g, point, 1);
  return {g.cls(), values(metric_geometry(g, coords).christoffel)};
}

DTensor riemann_curvature(const MetricField& g, const BasePoint& point) {
  auto coords = single_metric_coords(g, point, 2);
  return values(metric_geometry(g, coords).riemann);
}

RicciScalar ricci_and_scalar(const MetricField& g, const BasePoint& point) {
  auto coords = single_metric_coords(g, point, 2);
  auto geo = metric_geometry(g, coords);
  return {values(geo.ricci), geo.scalar.value()};
}

JetTensor levi_civita_derivative(const JetTensor& field, const MetricGeometry& g) {
  if (field.rank() + 1 > kMaxRank) throw SlotMismatch("covariant derivative exceeds rank limit");
  const JetSpace& space = g.christoffel[0].space();
  int order = g.christoffel[0].order();
  for (const auto& v : field.components()) order = std::min(order, v.order() - 1);
  if (order < 0) throw std::logic_error("field jets too short for a covariant derivative");

  auto slots = field.slots();
  slots.push_back({g.cls, Variance::lower, false});
  JetTensor out(slots, field.dims(), Jet::constant(space, 0.0, order));
  const std::size_t rank = field.rank();
  const std::size_t d = field.dims().extent(g.cls);
  for (std::size_t f = 0; f < out.size(); ++f) {
    MultiIndex idx = out.unflat(f);
    const std::size_t c = idx[rank];
    std::span<const std::size_t> base(idx.data(), rank);
    Jet acc = field.at(base).derivative(g.offset + c).truncated(order);
    for (std::size_t s = 0; s < rank; ++s) {
      if (field.slot(s).cls != g.cls) continue;
      MultiIndex moved = idx;
      const std::size_t own = idx[s];
      for (std::size_t q = 0; q < d; ++q) {
        moved[s] = q;
        const Jet& comp = field.at(std::span<const std::size_t>(moved.data(), rank));
        if (field.slot(s).variance == Variance::upper)
          acc += g.christoffel.at({own, q, c}) * comp;
        else
          acc -= g.christoffel.at({q, own, c}) * comp;
      }
    }
    out[f] = std::move(acc);
  }
  return out;
}

JetTensor cov_deriv_T(const JetTensor& field, const BaseGeometry& geo) {
  return levi_civita_derivative(field, geo.temporal());
}

JetTensor cov_deriv_M(const JetTensor& field, const BaseGeometry& geo) {
  return levi_civita_derivative(field, geo.spatial());
}

double bianchi_residual(const MetricField& g, const BasePoint& point) {
  auto coords = single_metric_coords(g, point, 3);
  auto geo = metric_geometry(g, coords);
  const std::size_t d = g.dim();
  const IndexSlot up{g.cls(), Variance::upper, false};
  const IndexSlot lo{g.cls(), Variance::lower, false};
  const Jet zero = Jet::constant(coords[0].space(), 0.0, 1);
  JetTensor einstein({up, lo}, g.dims(), zero);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t j = 0; j < d; ++j) {
      Jet v = zero;
      for (std::size_t s = 0; s < d; ++s) v += geo.inverse.at({r, s}) * geo.ricci.at({s, j});
      if (r == j) v -= geo.scalar * 0.5;
      einstein.at({r, j}) = v;
    }
  auto div = contract(levi_civita_derivative(einstein, geo), 0, 2);
  return max_abs(values(div));
}

}  // namespace polyham
