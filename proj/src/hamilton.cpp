#include "polyham/hamilton.hpp"

#include <cmath>

#include "polyham/errors.hpp"

namespace polyham {

namespace {

constexpr IndexSlot kPairSLo = pair_head(kSLo);
constexpr IndexSlot kPairSUp = pair_head(kSUp);

std::vector<Jet> phase_coordinates(Dims dims, const JetPoint& pt, int order) {
  const JetSpace& space = JetSpace::get(phase_dimension(dims), order);
  if (!pt.p.empty() && pt.p.size() != dims.n) throw ModelError("polymomenta need n rows");
  std::vector<Jet> out;
  auto read = [](const std::vector<double>& v, std::size_t k) { return k < v.size() ? v[k] : 0.0; };
  for (std::size_t a = 0; a < dims.m; ++a) out.push_back(Jet::variable(space, a, read(pt.t, a), order));
  for (std::size_t i = 0; i < dims.n; ++i)
    out.push_back(Jet::variable(space, dims.m + i, read(pt.x, i), order));
  for (std::size_t i = 0; i < dims.n; ++i) {
    if (!pt.p.empty() && pt.p[i].size() != dims.m) throw ModelError("polymomenta need m columns");
    for (std::size_t a = 0; a < dims.m; ++a) {
      const double v = pt.p.empty() ? 0.0 : pt.p[i][a];
      out.push_back(Jet::variable(space, momentum_variable(dims, i, a), v, order));
    }
  }
  return out;
}

// Values of h, phi and their inverses, A and P at a base point.
struct PointValues {
  DTensor h, h_inv, phi, phi_inv, a;
  double p;
};

PointValues point_values(const ElectrodynamicsModel& model, const BasePoint& point) {
  LocalModel lm(model, {point.t, point.x, {}}, 0);
  const auto& base = lm.base();
  return {values(base.temporal().metric), values(base.temporal().inverse),
          values(base.spatial().metric), values(base.spatial().inverse),
          values(lm.potential()), lm.scalar_potential().value()};
}

void check_grid(Dims dims, const Grid& g, const char* what) {
  if (g.size() != dims.n) throw ModelError(std::string(what) + " needs n rows");
  for (const auto& row : g)
    if (row.size() != dims.m) throw ModelError(std::string(what) + " needs m columns");
}

// d/d(coordinate) of every component, appending a lower slot of `cls`.
JetTensor gradient(const JetTensor& f, IndexClass cls, std::size_t offset) {
  auto slots = f.slots();
  slots.push_back({cls, Variance::lower, false});
  const int order = f[0].order() - 1;
  JetTensor out(slots, f.dims(), Jet::constant(f[0].space(), 0.0, order));
  const std::size_t d = f.dims().extent(cls);
  for (std::size_t q = 0; q < f.size(); ++q)
    for (std::size_t c = 0; c < d; ++c) out[q * d + c] = f[q].derivative(offset + c);
  return out;
}

}  // namespace

ElectrodynamicsModel::ElectrodynamicsModel(Dims dims, PhysicalConstants k, MetricField h,
                                           MetricField phi, std::vector<Expression> potential,
                                           Expression scalar_potential)
    : dims_(dims), k_(k), h_(std::move(h)), phi_(std::move(phi)), a_(std::move(potential)),
      p_(std::move(scalar_potential)) {
  if (dims.m == 0 || dims.n == 0) throw ModelError("dimensions must be positive");
  if (!std::isfinite(k.mass) || k.mass == 0.0) throw ModelError("mass must be nonzero");
  if (!std::isfinite(k.light_speed) || !(k.light_speed > 0.0))
    throw ModelError("light speed must be positive");
  if (!std::isfinite(k.charge)) throw ModelError("charge must be finite");
  if (h_.cls() != IndexClass::temporal || phi_.cls() != IndexClass::spatial)
    throw ModelError("h must be temporal and phi spatial");
  if (!(h_.dims() == dims) || !(phi_.dims() == dims)) throw ModelError("metric dims differ from model dims");
  if (a_.size() != dims.n * dims.m) throw ModelError("potential A needs n x m entries");
  const auto names = coordinate_names(dims);
  for (const auto& e : a_)
    if (e.variables() != names) throw ModelError("potential entries must be declared over t, x");
  if (p_.variables() != names) throw ModelError("scalar potential must be declared over t, x");
}

ElectrodynamicsModel ElectrodynamicsModel::with_scalar_potential(Expression p) const {
  return {dims_, k_, h_, phi_, a_, std::move(p)};
}

ElectrodynamicsModel ElectrodynamicsModel::with_charge(double e) const {
  PhysicalConstants k = k_;
  k.charge = e;
  return {dims_, k, h_, phi_, a_, p_};
}

std::size_t phase_dimension(Dims dims) { return dims.m + dims.n + dims.n * dims.m; }

std::size_t momentum_variable(Dims dims, std::size_t i, std::size_t a) {
  return dims.m + dims.n + i * dims.m + a;
}

LocalModel::LocalModel(const ElectrodynamicsModel& model, const JetPoint& point, int order)
    : model_(&model),
      dims_(model.dims()),
      space_(&JetSpace::get(phase_dimension(model.dims()), order)),
      order_(order),
      point_(point),
      base_(model.h(), model.phi(), phase_coordinates(model.dims(), point, order)) {
  const Dims d = dims_;
  const Jet zero = Jet::constant(*space_, 0.0, order);
  const auto all = base_.coords();

  momenta_ = JetTensor({kPairSLo, kTUp}, d, zero);
  potential_ = JetTensor({kPairSLo, kTUp}, d, zero);
  for (std::size_t i = 0; i < d.n; ++i)
    for (std::size_t a = 0; a < d.m; ++a) {
      momenta_.at({i, a}) = all[momentum_variable(d, i, a)];
      potential_.at({i, a}) = evaluate(model.potential(i, a));
    }
  scalar_ = evaluate(model.scalar_potential());
  if (order < 1) return;

  const double e = model.charge(), mass = model.mass();
  const auto& chi = base_.temporal().christoffel;
  const auto& gamma = base_.spatial().christoffel;
  const Jet zero1 = Jet::constant(*space_, 0.0, order - 1);

  // N1^(f)_(r)b = chi^f_bg p_r^g
  n1_ = JetTensor({kPairSLo, kTUp, kTLo}, d, zero1);
  for (std::size_t r = 0; r < d.n; ++r)
    for (std::size_t f = 0; f < d.m; ++f)
      for (std::size_t b = 0; b < d.m; ++b) {
        Jet acc = zero1;
        for (std::size_t g = 0; g < d.m; ++g) acc += chi.at({f, b, g}) * momenta_.at({r, g});
        n1_.at({r, f, b}) = acc;
      }

  // N2^(f)_(r)j = gamma^s_rj [(2e/m) A_s^f - p_s^f] - (e/m)(d_j A_r^f + d_r A_j^f)
  const JetTensor da = gradient(potential_, IndexClass::spatial, d.m);  // [r, f, j]
  n2_ = JetTensor({kPairSLo, kTUp, kSLo}, d, zero1);
  for (std::size_t r = 0; r < d.n; ++r)
    for (std::size_t f = 0; f < d.m; ++f)
      for (std::size_t j = 0; j < d.n; ++j) {
        Jet acc = (da.at({r, f, j}) + da.at({j, f, r})) * (-e / mass);
        for (std::size_t s = 0; s < d.n; ++s)
          acc += gamma.at({s, r, j}) * (potential_.at({s, f}) * (2 * e / mass) - momenta_.at({s, f}));
        n2_.at({r, f, j}) = acc;
      }
}

Jet LocalModel::evaluate(const Expression& e) const {
  return e.eval(base_.coords().first(dims_.m + dims_.n));
}

Jet LocalModel::hamiltonian() const {
  const auto& k = model_->constants();
  const double mc = k.mass * k.light_speed;
  const auto& h = base_.temporal().metric;
  const auto& phi_inv = base_.spatial().inverse;
  Jet pp = scalar_ * 0.0, ap = pp, aa = pp;
  for (std::size_t a = 0; a < dims_.m; ++a)
    for (std::size_t b = 0; b < dims_.m; ++b)
      for (std::size_t i = 0; i < dims_.n; ++i)
        for (std::size_t j = 0; j < dims_.n; ++j) {
          const Jet w = h.at({a, b}) * phi_inv.at({i, j});
          pp += w * (momenta_.at({i, a}) * momenta_.at({j, b}));
          ap += w * (potential_.at({j, b}) * momenta_.at({i, a}));
          aa += w * (potential_.at({i, a}) * potential_.at({j, b}));
        }
  const double e = k.charge, mass = k.mass, c = k.light_speed;
  Jet out = pp * (1.0 / (4 * mc));
  out -= ap * (e / (mass * mass * c));
  out += aa * (e * e / (mass * mass * mass * c));
  out -= scalar_;
  return out;
}

double lagrangian(const ElectrodynamicsModel& model, const BasePoint& point, const Grid& v) {
  const Dims d = model.dims();
  check_grid(d, v, "velocity");
  const auto pv = point_values(model, point);
  const double mc = model.mass() * model.light_speed();
  double quad = 0, lin = 0;
  for (std::size_t a = 0; a < d.m; ++a)
    for (std::size_t b = 0; b < d.m; ++b)
      for (std::size_t i = 0; i < d.n; ++i)
        for (std::size_t j = 0; j < d.n; ++j)
          quad += pv.h_inv.at({a, b}) * pv.phi.at({i, j}) * v[i][a] * v[j][b];
  for (std::size_t i = 0; i < d.n; ++i)
    for (std::size_t a = 0; a < d.m; ++a) lin += pv.a.at({i, a}) * v[i][a];
  return mc * quad + 2 * model.charge() / model.mass() * lin + pv.p;
}

Grid legendre_momenta(const ElectrodynamicsModel& model, const BasePoint& point, const Grid& v) {
  const Dims d = model.dims();
  check_grid(d, v, "velocity");
  const auto pv = point_values(model, point);
  const double mc = model.mass() * model.light_speed();
  Grid p(d.n, std::vector<double>(d.m, 0.0));
  for (std::size_t i = 0; i < d.n; ++i)
    for (std::size_t a = 0; a < d.m; ++a) {
      double s = 0;
      for (std::size_t b = 0; b < d.m; ++b)
        for (std::size_t j = 0; j < d.n; ++j) s += pv.h_inv.at({a, b}) * pv.phi.at({i, j}) * v[j][b];
      p[i][a] = 2 * mc * s + 2 * model.charge() / model.mass() * pv.a.at({i, a});
    }
  return p;
}

Grid velocities(const ElectrodynamicsModel& model, const BasePoint& point, const Grid& p) {
  const Dims d = model.dims();
  check_grid(d, p, "polymomentum");
  const auto pv = point_values(model, point);
  const double mc = model.mass() * model.light_speed();
  const double q = 2 * model.charge() / model.mass();
  Grid v(d.n, std::vector<double>(d.m, 0.0));
  for (std::size_t j = 0; j < d.n; ++j)
    for (std::size_t b = 0; b < d.m; ++b) {
      double s = 0;
      for (std::size_t a = 0; a < d.m; ++a)
        for (std::size_t i = 0; i < d.n; ++i)
          s += pv.h.at({b, a}) * pv.phi_inv.at({j, i}) * (p[i][a] - q * pv.a.at({i, a}));
      v[j][b] = s / (2 * mc);
    }
  return v;
}

double hamiltonian(const ElectrodynamicsModel& model, const JetPoint& point) {
  return LocalModel(model, point, 0).hamiltonian().value();
}

DTensor vertical_metric(const ElectrodynamicsModel& model, const BasePoint& point) {
  const Dims d = model.dims();
  const double mc = model.mass() * model.light_speed();
  const LocalModel lm(model, {point.t, point.x, {}}, 2);
  const DTensor h = values(lm.base().temporal().metric);
  const DTensor phi_inv = values(lm.base().spatial().inverse);
  const Jet H = lm.hamiltonian();
  DTensor out({kPairSUp, kTLo, kPairSUp, kTLo}, d);
  double worst = 0, scale = 0;
  for (std::size_t i = 0; i < d.n; ++i)
    for (std::size_t a = 0; a < d.m; ++a)
      for (std::size_t j = 0; j < d.n; ++j)
        for (std::size_t b = 0; b < d.m; ++b) {
          const double closed = h.at({a, b}) * phi_inv.at({i, j}) / (4 * mc);
          const double hess = 0.5 * H.derivative(momentum_variable(d, i, a))
                                        .derivative(momentum_variable(d, j, b))
                                        .value();
          worst = std::max(worst, std::abs(closed - hess));
          scale = std::max(scale, std::abs(closed));
          out.at({i, a, j, b}) = closed;
        }
  if (worst > 1e-10 * std::max(1.0, scale))
    throw ConsistencyFailure("vertical metric: closed form and Hessian of H differ by " +
                             std::to_string(worst));
  return out;
}

NonlinearConnection nonlinear_connection(const ElectrodynamicsModel& model, const JetPoint& point) {
  const LocalModel lm(model, point, 1);
  return {values(lm.n1()), values(lm.n2())};
}

Jet adapted_derivative(const LocalModel& lm, const Jet& field, Direction dir) {
  const Dims d = lm.dims();
  if (dir.kind == Direction::Kind::momentum) {
    if (dir.index >= d.n || dir.pair >= d.m) throw SlotMismatch("momentum direction out of range");
    return field.derivative(momentum_variable(d, dir.index, dir.pair));
  }
  if (lm.order() < 1) throw std::logic_error("adapted derivatives need a local model of order >= 1");
  const bool temporal = dir.kind == Direction::Kind::temporal;
  if (dir.index >= (temporal ? d.m : d.n)) throw SlotMismatch("direction index out of range");
  const JetTensor& n = temporal ? lm.n1() : lm.n2();
  Jet out = field.derivative((temporal ? 0 : d.m) + dir.index);
  for (std::size_t r = 0; r < d.n; ++r)
    for (std::size_t f = 0; f < d.m; ++f) {
      const Jet dp = field.derivative(momentum_variable(d, r, f));
      if (dp.is_zero()) continue;
      out -= n.at({r, f, dir.index}) * dp;
    }
  return out;
}

CartanConnection cartan_connection(const ElectrodynamicsModel& model, const BasePoint& point) {
  const Dims d = model.dims();
  const LocalModel lm(model, {point.t, point.x, {}}, 1);
  return {values(lm.base().temporal().christoffel), DTensor({kSUp, kSLo, kTLo}, d),
          values(lm.base().spatial().christoffel), DTensor({kSUp, kSLo, kPairSUp, kTLo}, d)};
}

TorsionJets torsion_jets(const LocalModel& lm) {
  if (lm.order() < 2) throw std::logic_error("torsions need a local model of order >= 2");
  const Dims d = lm.dims();
  const double e = lm.model().charge(), mass = lm.model().mass();
  const auto& base = lm.base();
  const auto& chi_r = base.temporal().riemann;
  const auto& frak_r = base.spatial().riemann;
  const auto& gamma = base.spatial().christoffel;
  const auto& A = lm.potential();
  const auto& p = lm.momenta();
  const Jet zero = Jet::constant(lm.space(), 0.0, lm.order() - 2);

  TorsionJets out;
  // R^(f)_(r)ab = chi^f_gab p_r^g
  out.r_tt = JetTensor({kPairSLo, kTUp, kTLo, kTLo}, d, zero);
  for (std::size_t r = 0; r < d.n; ++r)
    for (std::size_t f = 0; f < d.m; ++f)
      for (std::size_t a = 0; a < d.m; ++a)
        for (std::size_t b = 0; b < d.m; ++b) {
          Jet acc = zero;
          for (std::size_t g = 0; g < d.m; ++g) acc += chi_r.at({f, g, a, b}) * p.at({r, g});
          out.r_tt.at({r, f, a, b}) = acc;
        }

  // R^(f)_(r)aj = -(2e/m) gamma^s_rj A_(s);a^(f) + (e/m) [d_j A_r^f + d_r A_j^f]_;a
  const JetTensor a_t = cov_deriv_T(A, base);  // [s, f, a]
  const JetTensor da = gradient(A, IndexClass::spatial, d.m);  // [r, f, j]
  JetTensor sym({kPairSLo, kTUp, kSLo}, d, da[0]);
  for (std::size_t r = 0; r < d.n; ++r)
    for (std::size_t f = 0; f < d.m; ++f)
      for (std::size_t j = 0; j < d.n; ++j) sym.at({r, f, j}) = da.at({r, f, j}) + da.at({j, f, r});
  const JetTensor sym_t = cov_deriv_T(sym, base);  // [r, f, j, a]
  out.r_tx = JetTensor({kPairSLo, kTUp, kTLo, kSLo}, d, zero);
  for (std::size_t r = 0; r < d.n; ++r)
    for (std::size_t f = 0; f < d.m; ++f)
      for (std::size_t a = 0; a < d.m; ++a)
        for (std::size_t j = 0; j < d.n; ++j) {
          Jet acc = sym_t.at({r, f, j, a}) * (e / mass);
          for (std::size_t s = 0; s < d.n; ++s)
            acc -= gamma.at({s, r, j}) * a_t.at({s, f, a}) * (2 * e / mass);
          out.r_tx.at({r, f, a, j}) = acc;
        }

  // R^(f)_(r)ij = R^s_rij [(2e/m) A_s^f - p_s^f] - (e/m) [d_j A_i^f - d_i A_j^f]_:r
  JetTensor curl({kSLo, kSLo, kTUp}, d, da[0]);
  for (std::size_t i = 0; i < d.n; ++i)
    for (std::size_t j = 0; j < d.n; ++j)
      for (std::size_t f = 0; f < d.m; ++f) curl.at({i, j, f}) = da.at({i, f, j}) - da.at({j, f, i});
  const JetTensor curl_x = cov_deriv_M(curl, base);  // [i, j, f, r]
  out.r_xx = JetTensor({kPairSLo, kTUp, kSLo, kSLo}, d, zero);
  for (std::size_t r = 0; r < d.n; ++r)
    for (std::size_t f = 0; f < d.m; ++f)
      for (std::size_t i = 0; i < d.n; ++i)
        for (std::size_t j = 0; j < d.n; ++j) {
          Jet acc = curl_x.at({i, j, f, r}) * (-e / mass);
          for (std::size_t s = 0; s < d.n; ++s)
            acc += frak_r.at({s, r, i, j}) * (A.at({s, f}) * (2 * e / mass) - p.at({s, f}));
          out.r_xx.at({r, f, i, j}) = acc;
        }
  return out;
}

Torsions torsions(const ElectrodynamicsModel& model, const JetPoint& point) {
  const LocalModel lm(model, point, 2);
  auto t = torsion_jets(lm);
  return {values(t.r_tt), values(t.r_tx), values(t.r_xx)};
}

CartanCurvatures cartan_curvatures(const ElectrodynamicsModel& model, const BasePoint& point) {
  const Dims d = model.dims();
  const LocalModel lm(model, {point.t, point.x, {}}, 2);
  CartanCurvatures out;
  out.temporal = values(lm.base().temporal().riemann);
  out.spatial = values(lm.base().spatial().riemann);
  out.vertical_t = DTensor({kPairSLo, kTUp, kPairSUp, kTLo, kTLo, kTLo}, d);
  for (std::size_t l = 0; l < d.n; ++l)
    for (std::size_t dd = 0; dd < d.m; ++dd)
      for (std::size_t a = 0; a < d.m; ++a)
        for (std::size_t b = 0; b < d.m; ++b)
          for (std::size_t c = 0; c < d.m; ++c)
            out.vertical_t.at({l, dd, l, a, b, c}) = -out.temporal.at({dd, a, b, c});
  out.vertical_x = DTensor({kPairSLo, kTUp, kPairSUp, kTLo, kSLo, kSLo}, d);
  for (std::size_t i = 0; i < d.n; ++i)
    for (std::size_t a = 0; a < d.m; ++a)
      for (std::size_t l = 0; l < d.n; ++l)
        for (std::size_t j = 0; j < d.n; ++j)
          for (std::size_t k = 0; k < d.n; ++k)
            out.vertical_x.at({i, a, l, a, j, k}) = out.spatial.at({l, i, j, k});
  return out;
}

JetTensor dcov_deriv(const LocalModel& lm, const JetTensor& field, CovKind kind) {
  const Dims d = lm.dims();
  if (!(field.dims() == d)) throw SlotMismatch("field dims differ from the model");
  auto slots = field.slots();
  const std::size_t rank = field.rank();
  int order = field.size() ? field[0].order() - 1 : 0;
  for (const auto& v : field.components()) order = std::min(order, v.order() - 1);
  if (order < 0) throw std::logic_error("field jets too short for a derivative");

  if (kind == CovKind::vertical) {
    slots.push_back(kPairSUp);
    slots.push_back(kTLo);
    if (slots.size() > kMaxRank) throw SlotMismatch("covariant derivative exceeds rank limit");
    JetTensor out(slots, d, Jet::constant(lm.space(), 0.0, order));
    for (std::size_t q = 0; q < field.size(); ++q)
      for (std::size_t j = 0; j < d.n; ++j)
        for (std::size_t b = 0; b < d.m; ++b)
          out[(q * d.n + j) * d.m + b] = field[q].derivative(momentum_variable(d, j, b)).truncated(order);
    return out;
  }

  const IndexClass cls = kind == CovKind::horizontal_t ? IndexClass::temporal : IndexClass::spatial;
  const MetricGeometry& g = lm.base().of(cls);
  order = std::min(order, g.christoffel[0].order());
  slots.push_back({cls, Variance::lower, false});
  if (slots.size() > kMaxRank) throw SlotMismatch("covariant derivative exceeds rank limit");
  JetTensor out(slots, d, Jet::constant(lm.space(), 0.0, order));
  const std::size_t ext = d.extent(cls);
  for (std::size_t q = 0; q < field.size(); ++q)
    for (std::size_t c = 0; c < ext; ++c) {
      const Direction dir = cls == IndexClass::temporal ? Direction::t(c) : Direction::x(c);
      Jet acc = adapted_derivative(lm, field[q], dir).truncated(order);
      MultiIndex idx = field.unflat(q);
      for (std::size_t s = 0; s < rank; ++s) {
        if (field.slot(s).cls != cls) continue;
        const std::size_t own = idx[s];
        MultiIndex moved = idx;
        for (std::size_t w = 0; w < ext; ++w) {
          moved[s] = w;
          const Jet& comp = field.at(std::span<const std::size_t>(moved.data(), rank));
          if (field.slot(s).variance == Variance::upper)
            acc += g.christoffel.at({own, w, c}) * comp;
          else
            acc -= g.christoffel.at({w, own, c}) * comp;
        }
      }
      out[q * ext + c] = std::move(acc);
    }
  return out;
}

}  // namespace polyham
