#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "polyham/geometry.hpp"

using namespace polyham;

namespace {

MetricField metric(IndexClass cls, Dims dims, const std::vector<std::string>& src) {
  const auto names = coordinate_names(dims);
  std::vector<Expression> e;
  for (const auto& s : src) e.push_back(parse(s, names));
  return MetricField(cls, dims, std::move(e));
}

const Dims kSphereDims{1, 2};

MetricField sphere() {
  return metric(IndexClass::spatial, kSphereDims, {"1", "0", "0", "sin(x1)^2"});
}

// A generic non-diagonal spatial metric on R^3 (positive definite near the origin).
const Dims kWarpDims{2, 3};

MetricField warped() {
  return metric(IndexClass::spatial, kWarpDims,
                {"2 + sin(x1)*x2", "0.3*x3", "0.1*x1*x2",  //
                 "0.3*x3", "1.5 + x3^2", "0.2*cos(x2)",    //
                 "0.1*x1*x2", "0.2*cos(x2)", "3 + x1^2"});
}

MetricField temporal_warped() {
  return metric(IndexClass::temporal, kWarpDims, {"exp(t1)", "0.2*t2", "0.2*t2", "1 + t1^2"});
}

// Christoffel symbols from central differences of the evaluated metric.
DTensor christoffel_fd(const MetricField& g, const BasePoint& pt) {
  const std::size_t d = g.dim();
  const double h = 1e-5;
  auto eval_at = [&](const BasePoint& q) {
    auto coords = coordinate_jets(g.dims(), q, 0);
    return values(g.evaluate(coords));
  };
  auto shift = [&](std::size_t c, double dx) {
    BasePoint q = pt;
    q.t.resize(g.dims().m);
    q.x.resize(g.dims().n);
    auto& v = g.cls() == IndexClass::temporal ? q.t : q.x;
    v[c] += dx;
    return eval_at(q);
  };
  std::vector<DTensor> dg;
  for (std::size_t c = 0; c < d; ++c) {
    DTensor diff = difference(shift(c, h), shift(c, -h));
    dg.push_back(scaled(diff, 1.0 / (2 * h)));
  }
  const DTensor inv = invert_metric(eval_at(pt));
  const IndexSlot up{g.cls(), Variance::upper, false};
  const IndexSlot lo{g.cls(), Variance::lower, false};
  DTensor gamma({up, lo, lo}, g.dims());
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        double s = 0;
        for (std::size_t r = 0; r < d; ++r)
          s += inv.at({k, r}) * 0.5 * (dg[i].at({r, j}) + dg[j].at({r, i}) - dg[r].at({i, j}));
        gamma.at({k, i, j}) = s;
      }
  return gamma;
}

BasePoint random_point(std::mt19937_64& rng, Dims dims, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  BasePoint p;
  for (std::size_t a = 0; a < dims.m; ++a) p.t.push_back(u(rng));
  for (std::size_t i = 0; i < dims.n; ++i) p.x.push_back(u(rng));
  return p;
}

}  // namespace

TEST_CASE("christoffel: flat metric vanishes") {
  auto flat = metric(IndexClass::spatial, {1, 2}, {"1", "0", "0", "1"});
  CHECK(max_abs(christoffel(flat, {{0.0}, {0.3, 0.4}}).gamma) == 0.0);
}

TEST_CASE("christoffel: unit sphere") {
  const double th = 0.9;
  auto c = christoffel(sphere(), {{0.0}, {th, 0.2}}).gamma;
  CHECK(c.at({0, 1, 1}) == doctest::Approx(-std::sin(th) * std::cos(th)).epsilon(1e-14));
  CHECK(c.at({1, 0, 1}) == doctest::Approx(std::cos(th) / std::sin(th)).epsilon(1e-14));
  CHECK(c.at({1, 1, 0}) == c.at({1, 0, 1}));
  CHECK(c.at({0, 0, 0}) == 0.0);
  CHECK(c.at({1, 1, 1}) == 0.0);
}

TEST_CASE("christoffel: exponential temporal metric has chi = 1") {
  auto h = metric(IndexClass::temporal, {1, 2}, {"exp(2*t1)"});
  for (double t : {-0.7, 0.0, 0.4})
    CHECK(christoffel(h, {{t}, {0.1, 0.2}}).gamma[0] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("christoffel: matches finite differences of the metric") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const BasePoint pt = random_point(rng, kWarpDims, -0.5, 0.5);
    for (const auto& g : {warped(), temporal_warped()}) {
      const DTensor exact = christoffel(g, pt).gamma;
      CHECK(max_abs_diff(exact, christoffel_fd(g, pt)) < 1e-8);
    }
  }
}

TEST_CASE("riemann, ricci and scalar curvature of the unit sphere") {
  const double th = 1.1;
  const BasePoint pt{{0.0}, {th, 0.5}};
  const DTensor r = riemann_curvature(sphere(), pt);
  const double s2 = std::sin(th) * std::sin(th);
  CHECK(r.at({0, 1, 0, 1}) == doctest::Approx(-s2).epsilon(1e-13));
  CHECK(r.at({0, 1, 1, 0}) == doctest::Approx(s2).epsilon(1e-13));
  CHECK(r.at({1, 0, 0, 1}) == doctest::Approx(1.0).epsilon(1e-13));

  const auto rs = ricci_and_scalar(sphere(), pt);
  CHECK(rs.ricci.at({0, 0}) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(rs.ricci.at({1, 1}) == doctest::Approx(s2).epsilon(1e-13));
  CHECK(std::abs(rs.ricci.at({0, 1})) < 1e-14);
  CHECK(rs.scalar == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("curvature symmetries of a generic metric") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const BasePoint pt = random_point(rng, kWarpDims, -0.5, 0.5);
    const DTensor r = riemann_curvature(warped(), pt);
    const double scale = std::max(1.0, max_abs(r));
    CHECK(max_abs(sum(r, permute(r, std::vector<std::size_t>{0, 1, 3, 2}))) <= 1e-14 * scale);
    CHECK(max_abs(cyclic_sum(r, {1, 2, 3})) <= 1e-13 * scale);
    const auto rs = ricci_and_scalar(warped(), pt);
    CHECK(max_abs_diff(rs.ricci, permute(rs.ricci, std::vector<std::size_t>{1, 0})) <= 1e-13 * scale);
  }
}

TEST_CASE("metric compatibility at 100 points") {
  std::mt19937_64 rng(8);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const BasePoint pt = random_point(rng, kWarpDims, -0.6, 0.6);
    BaseGeometry geo(temporal_warped(), warped(), pt, 2);
    worst = std::max(worst, max_abs(values(cov_deriv_M(geo.spatial().metric, geo))));
    worst = std::max(worst, max_abs(values(cov_deriv_T(geo.temporal().metric, geo))));
    worst = std::max(worst, max_abs(values(cov_deriv_M(geo.spatial().inverse, geo))));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("contracted Bianchi identity") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    const BasePoint pt = random_point(rng, kWarpDims, -0.5, 0.5);
    CHECK(bianchi_residual(warped(), pt) < 1e-11);
    CHECK(bianchi_residual(temporal_warped(), pt) < 1e-11);
  }
  CHECK(bianchi_residual(sphere(), {{0.0}, {0.8, 0.1}}) < 1e-12);
}

TEST_CASE("covariant derivatives act on their own class only") {
  const Dims dims{1, 2};
  const auto names = coordinate_names(dims);
  auto h = metric(IndexClass::temporal, dims, {"exp(2*t1)"});
  BaseGeometry geo(h, sphere(), {{0.3}, {0.7, 0.2}}, 2);

  // A mixed field X^i_a: ";a" corrects only the temporal slot, ":k" only the spatial one.
  TensorField field{{kSUp, kTLo}, dims, {parse("t1*x2", names), parse("sin(x1) + t1", names)}};
  const JetTensor x = field.evaluate(geo.coords());
  const DTensor dt = values(cov_deriv_T(x, geo));
  const DTensor dx = values(cov_deriv_M(x, geo));
  const double t = 0.3, th = 0.7, ph = 0.2;
  // X^1_1 = t*phi, X^2_1 = sin(theta) + t; chi = 1.
  CHECK(dt.at({0, 0, 0}) == doctest::Approx(ph - t * ph).epsilon(1e-14));
  CHECK(dt.at({1, 0, 0}) == doctest::Approx(1 - (std::sin(th) + t)).epsilon(1e-14));
  const double cot = std::cos(th) / std::sin(th);
  const double sc = std::sin(th) * std::cos(th);
  // (:theta) X^phi = d_theta X^phi + cot X^phi; (:phi) X^theta = d_phi X^theta - sc X^phi.
  CHECK(dx.at({1, 0, 0}) == doctest::Approx(std::cos(th) + cot * (std::sin(th) + t)).epsilon(1e-14));
  CHECK(dx.at({0, 0, 1}) == doctest::Approx(t - sc * (std::sin(th) + t)).epsilon(1e-14));
  CHECK(dx.slot(2) == kSLo);
}

TEST_CASE("covariant derivative obeys Leibniz") {
  const auto names = coordinate_names(kWarpDims);
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    const BasePoint pt = random_point(rng, kWarpDims, -0.5, 0.5);
    BaseGeometry geo(temporal_warped(), warped(), pt, 2);
    TensorField u{{kSUp}, kWarpDims, {parse("x1*x2", names), parse("cos(x3)", names), parse("t1", names)}};
    TensorField w{{kSLo, kTUp}, kWarpDims,
                  {parse("x3", names), parse("x1^2", names), parse("t2*x2", names),
                   parse("1", names), parse("sin(x1)", names), parse("x2*x3", names)}};
    const JetTensor ju = u.evaluate(geo.coords());
    const JetTensor jw = w.evaluate(geo.coords());
    const DTensor lhs = values(cov_deriv_M(outer(ju, jw), geo));
    // outer(du, w) has slots [u, k, w...]; move k to the end.
    const DTensor a = permute(values(outer(cov_deriv_M(ju, geo), jw)), std::vector<std::size_t>{0, 2, 3, 1});
    const DTensor b = values(outer(ju, cov_deriv_M(jw, geo)));
    CHECK(max_abs_diff(lhs, sum(a, b)) <= 1e-13);
  }
}

TEST_CASE("metric fields reject cross-class dependence") {
  CHECK_THROWS_AS(metric(IndexClass::spatial, {1, 2}, {"1 + t1^2", "0", "0", "1"}), ModelError);
  CHECK_THROWS_AS(metric(IndexClass::temporal, {1, 2}, {"x1"}), ModelError);
  CHECK_THROWS_AS(metric(IndexClass::temporal, {1, 2}, {"1", "1"}), ModelError);
}
