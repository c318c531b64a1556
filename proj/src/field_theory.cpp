#include "polyham/field_theory.hpp"

#include <cmath>

#include "polyham/errors.hpp"

namespace polyham {

namespace {

constexpr IndexSlot kPairSUp = pair_head(kSUp);
constexpr IndexSlot kPairSLo = pair_head(kSLo);

double mc_of(const ElectrodynamicsModel& m) { return m.mass() * m.light_speed(); }

Jet zero_jet(const LocalModel& lm, int order) { return Jet::constant(lm.space(), 0.0, order); }

void track(Residual& r, double residual, std::initializer_list<double> terms) {
  r.max_abs = std::max(r.max_abs, std::abs(residual));
  for (double t : terms) r.scale = std::max(r.scale, std::abs(t));
}

// A_(r):j^(f) + A_(j):r^(f) as [r, f, j].
JetTensor symmetric_potential_derivative(const LocalModel& lm) {
  const Dims d = lm.dims();
  const JetTensor ax = cov_deriv_M(lm.potential(), lm.base());  // [r, f, j]
  JetTensor out = ax;
  for (std::size_t r = 0; r < d.n; ++r)
    for (std::size_t f = 0; f < d.m; ++f)
      for (std::size_t j = 0; j < d.n; ++j) out.at({r, f, j}) = ax.at({r, f, j}) + ax.at({j, f, r});
  return out;
}

// Plain d_j A_(r)^(f) as [r, f, j].
JetTensor potential_gradient(const LocalModel& lm) {
  const Dims d = lm.dims();
  const auto& A = lm.potential();
  JetTensor out({kPairSLo, kTUp, kSLo}, d, zero_jet(lm, A[0].order() - 1));
  for (std::size_t r = 0; r < d.n; ++r)
    for (std::size_t f = 0; f < d.m; ++f)
      for (std::size_t j = 0; j < d.n; ++j) out.at({r, f, j}) = A.at({r, f}).derivative(d.m + j);
  return out;
}

DTensor pack_square(const std::vector<double>& a, std::size_t n) {
  DTensor t({kSLo, kSLo}, Dims{1, n});
  for (std::size_t f = 0; f < a.size(); ++f) t[f] = a[f];
  return t;
}

}  // namespace

JetTensor liouville_field(const LocalModel& lm) {
  const Dims d = lm.dims();
  const double mc = mc_of(lm.model());
  const auto& h = lm.base().temporal().metric;
  const auto& phi_inv = lm.base().spatial().inverse;
  const auto& p = lm.momenta();
  JetTensor out({kPairSUp, kTLo}, d, zero_jet(lm, lm.order()));
  for (std::size_t i = 0; i < d.n; ++i)
    for (std::size_t a = 0; a < d.m; ++a) {
      Jet acc = zero_jet(lm, lm.order());
      for (std::size_t f = 0; f < d.m; ++f)
        for (std::size_t r = 0; r < d.n; ++r) acc += h.at({a, f}) * phi_inv.at({i, r}) * p.at({r, f});
      out.at({i, a}) = acc * (1.0 / (4 * mc));
    }
  return out;
}

DeflectionJets deflections_closed(const LocalModel& lm) {
  const Dims d = lm.dims();
  const auto& model = lm.model();
  const double e = model.charge(), mass = model.mass(), c = model.light_speed();
  const auto& h = lm.base().temporal().metric;
  const auto& phi_inv = lm.base().spatial().inverse;
  const JetTensor sym = symmetric_potential_derivative(lm);
  const int order = sym[0].order();

  DeflectionJets out;
  out.delta_t = JetTensor({kPairSUp, kTLo, kTLo}, d, zero_jet(lm, order));
  out.delta_x = JetTensor({kPairSUp, kTLo, kSLo}, d, zero_jet(lm, order));
  for (std::size_t i = 0; i < d.n; ++i)
    for (std::size_t a = 0; a < d.m; ++a)
      for (std::size_t j = 0; j < d.n; ++j) {
        Jet acc = zero_jet(lm, order);
        for (std::size_t f = 0; f < d.m; ++f)
          for (std::size_t r = 0; r < d.n; ++r) acc += h.at({a, f}) * phi_inv.at({i, r}) * sym.at({r, f, j});
        out.delta_x.at({i, a, j}) = acc * (e / (4 * mass * mass * c));
      }
  out.theta = JetTensor({kPairSUp, kTLo, kPairSUp, kTLo}, d, zero_jet(lm, order));
  for (std::size_t i = 0; i < d.n; ++i)
    for (std::size_t a = 0; a < d.m; ++a)
      for (std::size_t j = 0; j < d.n; ++j)
        for (std::size_t b = 0; b < d.m; ++b)
          out.theta.at({i, a, j, b}) = (h.at({a, b}) * phi_inv.at({i, j})).truncated(order) * (1.0 / (4 * mass * c));
  return out;
}

DeflectionJets deflections_covariant(const LocalModel& lm) {
  const JetTensor field = liouville_field(lm);
  return {dcov_deriv(lm, field, CovKind::horizontal_t), dcov_deriv(lm, field, CovKind::horizontal_x),
          dcov_deriv(lm, field, CovKind::vertical)};
}

DeflectionReport deflection_tensors(const ElectrodynamicsModel& model, const JetPoint& point) {
  const LocalModel lm(model, point, 1);
  const auto closed = deflections_closed(lm);
  const auto cov = deflections_covariant(lm);
  DeflectionReport out{{values(closed.delta_t), values(closed.delta_x), values(closed.theta)},
                       {values(cov.delta_t), values(cov.delta_x), values(cov.theta)},
                       {}};
  auto compare = [&](const DTensor& a, const DTensor& b) {
    for (std::size_t f = 0; f < a.size(); ++f) track(out.residual, a[f] - b[f], {a[f], b[f]});
  };
  compare(out.closed.delta_t, out.covariant.delta_t);
  compare(out.closed.delta_x, out.covariant.delta_x);
  compare(out.closed.theta, out.covariant.theta);
  if (out.residual.max_abs > 1e-9 * std::max(1.0, out.residual.scale))
    throw ConsistencyFailure("deflection tensors: closed form and covariant derivative differ by " +
                             std::to_string(out.residual.max_abs));
  return out;
}

ElectromagneticJets electromagnetic_jets(const LocalModel& lm) {
  const auto defl = deflections_closed(lm);
  return {scaled(antisymmetrize_pair(defl.delta_x, 0, 2, SlotCheck::positional), 0.5),
          scaled(antisymmetrize_pair(defl.theta, 0, 2), 0.5)};
}

ElectromagneticForm electromagnetic_form(const ElectrodynamicsModel& model, const BasePoint& point) {
  const LocalModel lm(model, {point.t, point.x, {}}, 1);
  const auto em = electromagnetic_jets(lm);
  return {values(em.big_f), values(em.small_f)};
}

MaxwellResiduals maxwell_residuals(const LocalModel& lm) {
  if (lm.order() < 2) throw std::logic_error("Maxwell residuals need a local model of order >= 2");
  const Dims d = lm.dims();
  const auto& model = lm.model();
  const double e = model.charge(), mass = model.mass(), c = model.light_speed();
  const double mc = mass * c;
  const auto& base = lm.base();
  const auto& h = base.temporal().metric;
  const auto& phi_inv = base.spatial().inverse;
  const auto& gamma = base.spatial().christoffel;
  const auto& frak_r = base.spatial().riemann;
  const auto& A = lm.potential();
  const auto& p = lm.momenta();

  const auto defl = deflections_closed(lm);
  const JetTensor big_f = scaled(antisymmetrize_pair(defl.delta_x, 0, 2, SlotCheck::positional), 0.5);
  const JetTensor da = potential_gradient(lm);  // [r, f, j]
  MaxwellResiduals out;

  // Block 1: F_/b = e h_af / (8 m^2 c) Alt_ij { phi^ir [d_j A_r + d_r A_j]_;b - 2 phi^ir gamma^s_rj A_s;b }
  {
    const DTensor lhs = values(dcov_deriv(lm, big_f, CovKind::horizontal_t));  // [i, a, j, b]
    JetTensor sym({kPairSLo, kTUp, kSLo}, d, da[0]);
    for (std::size_t r = 0; r < d.n; ++r)
      for (std::size_t f = 0; f < d.m; ++f)
        for (std::size_t j = 0; j < d.n; ++j) sym.at({r, f, j}) = da.at({r, f, j}) + da.at({j, f, r});
    const DTensor sym_t = values(cov_deriv_T(sym, base));     // [r, f, j, b]
    const DTensor a_t = values(cov_deriv_T(A, base));         // [s, f, b]
    const DTensor hv = values(h), piv = values(phi_inv), gv = values(gamma);
    DTensor inner({kSUp, kTUp, kSLo, kTLo}, d);  // [i, f, j, b]
    for (std::size_t i = 0; i < d.n; ++i)
      for (std::size_t f = 0; f < d.m; ++f)
        for (std::size_t j = 0; j < d.n; ++j)
          for (std::size_t b = 0; b < d.m; ++b) {
            double s = 0;
            for (std::size_t r = 0; r < d.n; ++r) {
              double g = 0;
              for (std::size_t q = 0; q < d.n; ++q) g += gv.at({q, r, j}) * a_t.at({q, f, b});
              s += piv.at({i, r}) * (sym_t.at({r, f, j, b}) - 2 * g);
            }
            inner.at({i, f, j, b}) = s;
          }
    const DTensor alt = antisymmetrize_pair(inner, 0, 2, SlotCheck::positional);
    out.res1 = DTensor({kPairSUp, kTLo, kSLo, kTLo}, d);
    const double k1 = e / (8 * mass * mass * c);
    for (std::size_t f = 0; f < out.res1.size(); ++f) {
      const MultiIndex ix = out.res1.unflat(f);  // i, a, j, b
      double rhs = 0;
      for (std::size_t g = 0; g < d.m; ++g) rhs += hv.at({ix[1], g}) * alt.at({ix[0], g, ix[2], ix[3]});
      rhs *= k1;
      out.res1[f] = lhs[f] - rhs;
      track(out.r1, out.res1[f], {lhs[f], rhs});
    }
  }

  // Block 2: cyc_ijk F_|k = -h_af/(8mc) cyc_ijk { [phi^sr R^i_rjk - phi^ir R^s_rjk] p_s^f
  //                                + (e/m) phi^ir [2 R^s_rjk A_s^f - (d_k A_j - d_j A_k)_:r] }
  // F_|k is the alternation of Delta_|k in (i, j).
  {
    const JetTensor dk = dcov_deriv(lm, defl.delta_x, CovKind::horizontal_x);  // [i, a, j, k]
    const DTensor f_k = values(scaled(antisymmetrize_pair(dk, 0, 2, SlotCheck::positional), 0.5));
    const DTensor lhs = cyclic_sum(f_k, {0, 2, 3}, SlotCheck::positional);

    JetTensor curl({kSLo, kSLo, kTUp}, d, da[0]);  // [j, k, f] = d_k A_j - d_j A_k
    for (std::size_t j = 0; j < d.n; ++j)
      for (std::size_t k = 0; k < d.n; ++k)
        for (std::size_t f = 0; f < d.m; ++f) curl.at({j, k, f}) = da.at({j, f, k}) - da.at({k, f, j});
    const DTensor curl_x = values(cov_deriv_M(curl, base));  // [j, k, f, r]
    const DTensor hv = values(h), piv = values(phi_inv), rv = values(frak_r), av = values(A), pv = values(p);
    DTensor inner({kSUp, kTUp, kSLo, kSLo}, d);  // [i, f, j, k]
    for (std::size_t i = 0; i < d.n; ++i)
      for (std::size_t f = 0; f < d.m; ++f)
        for (std::size_t j = 0; j < d.n; ++j)
          for (std::size_t k = 0; k < d.n; ++k) {
            double s = 0;
            for (std::size_t q = 0; q < d.n; ++q)
              for (std::size_t r = 0; r < d.n; ++r) {
                s += (piv.at({q, r}) * rv.at({i, r, j, k}) - piv.at({i, r}) * rv.at({q, r, j, k})) *
                     pv.at({q, f});
                s += e / mass * piv.at({i, r}) * 2 * rv.at({q, r, j, k}) * av.at({q, f});
              }
            for (std::size_t r = 0; r < d.n; ++r) s -= e / mass * piv.at({i, r}) * curl_x.at({j, k, f, r});
            inner.at({i, f, j, k}) = s;
          }
    const DTensor cyc = cyclic_sum(inner, {0, 2, 3}, SlotCheck::positional);
    out.res2 = DTensor({kPairSUp, kTLo, kSLo, kSLo}, d);
    for (std::size_t f = 0; f < out.res2.size(); ++f) {
      const MultiIndex ix = out.res2.unflat(f);  // i, a, j, k
      double rhs = 0;
      for (std::size_t g = 0; g < d.m; ++g) rhs += hv.at({ix[1], g}) * cyc.at({ix[0], g, ix[2], ix[3]});
      rhs *= -1.0 / (8 * mc);
      out.res2[f] = lhs[f] - rhs;
      track(out.r2, out.res2[f], {lhs[f], rhs});
    }
  }

  // Block 3: cyc_ijk F^(i)_(a)j |^(k)_(c) = 0
  {
    const DTensor v = values(dcov_deriv(lm, big_f, CovKind::vertical));  // [i, a, j, k, c]
    out.res3 = cyclic_sum(v, {0, 2, 3}, SlotCheck::positional);
    for (std::size_t f = 0; f < out.res3.size(); ++f) track(out.r3, out.res3[f], {v[f]});
  }
  return out;
}

MaxwellResiduals maxwell_residuals(const ElectrodynamicsModel& model, const JetPoint& point) {
  return maxwell_residuals(LocalModel(model, point, 2));
}

GravPotential gravitational_potential(const ElectrodynamicsModel& model, const BasePoint& point) {
  const Dims d = model.dims();
  const LocalModel lm(model, {point.t, point.x, {}}, 0);
  const DTensor hstar = scaled(values(lm.base().temporal().metric), 1.0 / (4 * mc_of(model)));
  const DTensor phi = values(lm.base().spatial().metric);
  const DTensor phi_inv = values(lm.base().spatial().inverse);
  DTensor vertical({kPairSUp, kTLo, kPairSUp, kTLo}, d);
  for (std::size_t i = 0; i < d.n; ++i)
    for (std::size_t a = 0; a < d.m; ++a)
      for (std::size_t j = 0; j < d.n; ++j)
        for (std::size_t b = 0; b < d.m; ++b) vertical.at({i, a, j, b}) = hstar.at({a, b}) * phi_inv.at({i, j});
  return {hstar, phi, vertical};
}

EinsteinBlocks stress_energy(const ElectrodynamicsModel& model, const BasePoint& point, double k) {
  if (k == 0.0) throw ZeroEinsteinConstant();
  const Dims d = model.dims();
  const double mc = mc_of(model);
  const auto th = ricci_and_scalar(model.h(), point);
  const auto sp = ricci_and_scalar(model.phi(), point);
  const LocalModel lm(model, {point.t, point.x, {}}, 0);
  const DTensor h = values(lm.base().temporal().metric);
  const DTensor phi = values(lm.base().spatial().metric);
  const DTensor phi_inv = values(lm.base().spatial().inverse);
  const double sc = 4 * mc * th.scalar + sp.scalar;

  EinsteinBlocks out;
  out.k = k;
  out.scalar = sc;
  out.t_tt = DTensor({kTLo, kTLo}, d);
  for (std::size_t f = 0; f < out.t_tt.size(); ++f)
    out.t_tt[f] = (th.ricci[f] - sc / (8 * mc) * h[f]) / k;
  out.t_xx = DTensor({kSLo, kSLo}, d);
  for (std::size_t f = 0; f < out.t_xx.size(); ++f) out.t_xx[f] = (sp.ricci[f] - sc / 2 * phi[f]) / k;
  out.t_vertical = DTensor({kPairSUp, kTLo, kPairSUp, kTLo}, d);
  for (std::size_t i = 0; i < d.n; ++i)
    for (std::size_t a = 0; a < d.m; ++a)
      for (std::size_t j = 0; j < d.n; ++j)
        for (std::size_t b = 0; b < d.m; ++b)
          out.t_vertical.at({i, a, j, b}) = (-sc / (8 * mc) * h.at({a, b}) * phi_inv.at({i, j})) / k;
  out.zero_blocks = {
      {"T_ai", DTensor({kTLo, kSLo}, d)},
      {"T_ia", DTensor({kSLo, kTLo}, d)},
      {"T^(i)_(a)b", DTensor({kPairSUp, kTLo, kTLo}, d)},
      {"T^(j)_a(b)", DTensor({kTLo, kPairSUp, kTLo}, d)},
      {"T^(j)_i(b)", DTensor({kSLo, kPairSUp, kTLo}, d)},
      {"T^(i)_(a)j", DTensor({kPairSUp, kTLo, kSLo}, d)},
  };
  return out;
}

ScalarDecomposition cartan_scalar_curvature(const ElectrodynamicsModel& model, const BasePoint& point) {
  const Dims d = model.dims();
  const double mc = mc_of(model);
  const auto curv = cartan_curvatures(model, point);
  const auto pot = gravitational_potential(model, point);
  // Ricci blocks by contracting each curvature's upper index with its last lower index.
  const DTensor ric_t = contract(curv.temporal, 0, 3);
  const DTensor ric_x = contract(curv.spatial, 0, 3);

  const std::size_t dim = d.m + d.n + d.n * d.m;
  std::vector<double> g(dim * dim, 0.0), ric(dim * dim, 0.0);
  auto at = [dim](std::vector<double>& v, std::size_t r, std::size_t c) -> double& { return v[r * dim + c]; };
  for (std::size_t a = 0; a < d.m; ++a)
    for (std::size_t b = 0; b < d.m; ++b) {
      at(g, a, b) = pot.temporal.at({a, b});
      at(ric, a, b) = ric_t.at({a, b});
    }
  for (std::size_t i = 0; i < d.n; ++i)
    for (std::size_t j = 0; j < d.n; ++j) {
      at(g, d.m + i, d.m + j) = pot.spatial.at({i, j});
      at(ric, d.m + i, d.m + j) = ric_x.at({i, j});
    }
  // The vertical and mixed Ricci blocks vanish: C = 0 and A = 0 leave no curvature
  // component whose upper index matches a vertical lower one.
  const std::size_t v0 = d.m + d.n;
  for (std::size_t i = 0; i < d.n; ++i)
    for (std::size_t a = 0; a < d.m; ++a)
      for (std::size_t j = 0; j < d.n; ++j)
        for (std::size_t b = 0; b < d.m; ++b)
          at(g, v0 + i * d.m + a, v0 + j * d.m + b) = pot.vertical.at({i, a, j, b});
  const DTensor g_inv = invert_metric(pack_square(g, dim));
  double sc = 0;
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) sc += g_inv.at({r, c}) * at(ric, r, c);

  const auto th = ricci_and_scalar(model.h(), point);
  const auto sp = ricci_and_scalar(model.phi(), point);
  return {sc, 4 * mc * th.scalar + sp.scalar};
}

ConservationResiduals conservation_residuals(const ElectrodynamicsModel& model, const BasePoint& point) {
  const Dims d = model.dims();
  const double mc = mc_of(model);
  const LocalModel lm(model, {point.t, point.x, {}}, 3);
  const auto& tg = lm.base().temporal();
  const auto& sg = lm.base().spatial();
  const Jet sc = tg.scalar * (4 * mc) + sg.scalar;

  ConservationResiduals out;
  // [4mc chi^f_b - Sc/2 delta^f_b]_/f
  JetTensor xt({kTUp, kTLo}, d, sc);
  for (std::size_t f = 0; f < d.m; ++f)
    for (std::size_t b = 0; b < d.m; ++b) {
      Jet acc = sc * 0.0;
      for (std::size_t q = 0; q < d.m; ++q) acc += tg.inverse.at({f, q}) * tg.ricci.at({q, b});
      acc *= 4 * mc;
      if (f == b) acc -= sc * 0.5;
      xt.at({f, b}) = acc;
    }
  const JetTensor dt_jet = cov_deriv_T(xt, lm.base());  // [f, b, c]
  const DTensor dt = values(dt_jet);
  const DTensor div_t = values(contract(dt_jet, 0, 2));
  out.res_t.assign(div_t.components().begin(), div_t.components().end());
  for (double v : out.res_t) track(out.t, v, {});
  for (double v : dt.components()) track(out.t, 0.0, {v});

  // [R^r_j - Sc/2 delta^r_j]_|r
  JetTensor xm({kSUp, kSLo}, d, sc);
  for (std::size_t r = 0; r < d.n; ++r)
    for (std::size_t j = 0; j < d.n; ++j) {
      Jet acc = sc * 0.0;
      for (std::size_t q = 0; q < d.n; ++q) acc += sg.inverse.at({r, q}) * sg.ricci.at({q, j});
      if (r == j) acc -= sc * 0.5;
      xm.at({r, j}) = acc;
    }
  const JetTensor dm_jet = cov_deriv_M(xm, lm.base());
  const DTensor dm = values(dm_jet);
  const DTensor div_m = values(contract(dm_jet, 0, 2));
  out.res_m.assign(div_m.components().begin(), div_m.components().end());
  for (double v : out.res_m) track(out.m, v, {});
  for (double v : dm.components()) track(out.m, 0.0, {v});
  return out;
}

}  // namespace polyham
