#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>
#include <random>
#include <thread>

#include "polyham/errors.hpp"
#include "polyham/expr.hpp"
#include "support/random_expr.hpp"

using namespace polyham;

namespace {

int count_calls(const Node& n) {
  int c = n.kind == NodeKind::call ? 1 : 0;
  if (n.lhs) c += count_calls(*n.lhs);
  if (n.rhs) c += count_calls(*n.rhs);
  return c;
}

const std::vector<std::string> kXYZ = {"x1", "x2", "x3"};

}  // namespace

TEST_CASE("parse: grammar smoke case") {
  auto e = parse("sin(x1)^2 + cos(x1)^2", {"x1"});
  CHECK(e.root().kind == NodeKind::add);
  CHECK(count_calls(e.root()) == 2);
}

TEST_CASE("parse: truncated input reports the offset") {
  try {
    parse("2*", {"x1"});
    FAIL("expected a syntax error");
  } catch (const SyntaxError& err) {
    CHECK(err.offset() == 2);
  }
}

TEST_CASE("parse: undeclared variable") {
  try {
    parse("x3", {"x1", "x2"});
    FAIL("expected unknown identifier");
  } catch (const UnknownIdentifier& err) {
    CHECK(err.name() == "x3");
  }
  CHECK_THROWS_AS(parse("foo(x1)", {"x1"}), UnknownIdentifier);
  CHECK_THROWS_AS(parse("(x1", {"x1"}), SyntaxError);
  CHECK_THROWS_AS(parse("x1 x1", {"x1"}), SyntaxError);
  CHECK_THROWS_AS(parse("", {"x1"}), SyntaxError);
  CHECK_THROWS_AS(parse("1e", {"x1"}), SyntaxError);
}

TEST_CASE("parse: precedence and associativity") {
  const std::vector<std::string> v = {"a", "b", "c"};
  auto e = parse("-a^2", v);
  CHECK(e.root().kind == NodeKind::negate);
  CHECK(e.root().lhs->kind == NodeKind::power);
  e = parse("a^b^c", v);
  CHECK(e.root().rhs->kind == NodeKind::power);
  e = parse("a - b - c", v);
  CHECK(e.root().lhs->kind == NodeKind::subtract);
  e = parse("a + b*c", v);
  CHECK(e.root().rhs->kind == NodeKind::multiply);
  CHECK(parse("2^-1", v).eval(std::vector<double>{0, 0, 0}) == 0.5);
  CHECK(parse("-2^2", v).eval(std::vector<double>{0, 0, 0}) == -4.0);
  CHECK(parse("2^3^2", v).eval(std::vector<double>{0, 0, 0}) == 512.0);
}

TEST_CASE("unparse: minimal parentheses and round-trip stability") {
  const std::vector<std::string> v = {"a", "b", "c"};
  CHECK(parse("(a + b) * c", v).unparse() == "(a + b)*c");
  CHECK(parse("a - (b - c)", v).unparse() == "a - (b - c)");
  CHECK(parse("a - (b + c)", v).unparse() == "a - (b + c)");
  CHECK(parse("((a)) + (b*c)", v).unparse() == "a + b*c");
  CHECK(parse("(-a)^2", v).unparse() == "(-a)^2");
  CHECK(parse("(a^b)^c", v).unparse() == "(a^b)^c");
  CHECK(parse("a^(-b)", v).unparse() == "a^-b");
  CHECK(parse("0.1 + 2.5e-7", v).unparse() == "0.1 + 2.5e-07");

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const std::string src = testing::random_smooth(rng, kXYZ, 4);
    const Expression first = parse(src, kXYZ);
    const std::string text = first.unparse();
    const Expression second = parse(text, kXYZ);
    INFO(src);
    CHECK(first == second);
    CHECK(second.unparse() == text);
  }
}

TEST_CASE("eval_derivatives: examples") {
  auto bilinear = eval_derivatives(parse("x1*x2", {"x1", "x2"}), {{"x1", 2}, {"x2", 3}},
                                   {"x1", "x2"}, 2);
  CHECK(bilinear.value() == 6.0);
  CHECK(bilinear.partial({"x1", "x2"}) == 1.0);
  CHECK(bilinear.partial({"x1"}) == 3.0);
  CHECK(bilinear.partial({"x1", "x1"}) == 0.0);

  auto identity = eval_derivatives(parse("sin(x1)^2+cos(x1)^2", {"x1"}), {{"x1", 0.7}}, {"x1"}, 1);
  CHECK(identity.value() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(identity.partial({"x1"})) < 1e-15);

  auto s = eval_derivatives(parse("sin(x1)", {"x1"}), {{"x1", 0.5}}, {"x1"}, 3);
  CHECK(s.partial({"x1", "x1", "x1"}) == doctest::Approx(-std::cos(0.5)).epsilon(1e-15));
}

TEST_CASE("eval_derivatives: elementary functions to third order") {
  struct Case {
    const char* src;
    std::function<double(double)> d0, d1, d2, d3;
  };
  const double u = 0.37;
  const std::vector<Case> cases = {
      {"exp(x1)", [](double v) { return std::exp(v); }, [](double v) { return std::exp(v); },
       [](double v) { return std::exp(v); }, [](double v) { return std::exp(v); }},
      {"log(x1)", [](double v) { return std::log(v); }, [](double v) { return 1 / v; },
       [](double v) { return -1 / (v * v); }, [](double v) { return 2 / (v * v * v); }},
      {"sqrt(x1)", [](double v) { return std::sqrt(v); },
       [](double v) { return 0.5 / std::sqrt(v); },
       [](double v) { return -0.25 * std::pow(v, -1.5); },
       [](double v) { return 0.375 * std::pow(v, -2.5); }},
      {"tan(x1)", [](double v) { return std::tan(v); },
       [](double v) { return 1 + std::tan(v) * std::tan(v); },
       [](double v) {
         double t = std::tan(v);
         return 2 * t * (1 + t * t);
       },
       [](double v) {
         double t = std::tan(v);
         return (2 + 6 * t * t) * (1 + t * t);
       }},
      {"sinh(x1)", [](double v) { return std::sinh(v); }, [](double v) { return std::cosh(v); },
       [](double v) { return std::sinh(v); }, [](double v) { return std::cosh(v); }},
      {"cosh(x1)", [](double v) { return std::cosh(v); }, [](double v) { return std::sinh(v); },
       [](double v) { return std::cosh(v); }, [](double v) { return std::sinh(v); }},
      {"x1^2.5", [](double v) { return std::pow(v, 2.5); },
       [](double v) { return 2.5 * std::pow(v, 1.5); },
       [](double v) { return 3.75 * std::pow(v, 0.5); },
       [](double v) { return 1.875 * std::pow(v, -0.5); }},
      {"1/x1", [](double v) { return 1 / v; }, [](double v) { return -1 / (v * v); },
       [](double v) { return 2 / (v * v * v); }, [](double v) { return -6 / (v * v * v * v); }},
      {"x1^x1", [](double v) { return std::pow(v, v); },
       [](double v) { return std::pow(v, v) * (std::log(v) + 1); },
       [](double v) {
         double l = std::log(v) + 1;
         return std::pow(v, v) * (l * l + 1 / v);
       },
       [](double v) {
         double l = std::log(v) + 1;
         return std::pow(v, v) * (l * l * l + 3 * l / v - 1 / (v * v));
       }},
  };
  for (const auto& c : cases) {
    INFO(c.src);
    auto b = eval_derivatives(parse(c.src, {"x1"}), {{"x1", u}}, {"x1"}, 3);
    CHECK(b.value() == doctest::Approx(c.d0(u)).epsilon(1e-13));
    CHECK(b.partial({"x1"}) == doctest::Approx(c.d1(u)).epsilon(1e-13));
    CHECK(b.partial({"x1", "x1"}) == doctest::Approx(c.d2(u)).epsilon(1e-13));
    CHECK(b.partial({"x1", "x1", "x1"}) == doctest::Approx(c.d3(u)).epsilon(1e-12));
  }
}

TEST_CASE("eval_derivatives: integer powers of negative bases, domain errors") {
  auto cube = eval_derivatives(parse("(x1 - 3)^3", {"x1"}), {{"x1", 1}}, {"x1"}, 3);
  CHECK(cube.value() == -8.0);
  CHECK(cube.partial({"x1"}) == 12.0);
  CHECK(cube.partial({"x1", "x1", "x1"}) == 6.0);
  auto inv = eval_derivatives(parse("(x1 - 3)^-2", {"x1"}), {{"x1", 1}}, {"x1"}, 1);
  CHECK(inv.value() == 0.25);

  const std::map<std::string, double> at1 = {{"x1", 1.0}};
  CHECK_THROWS_AS(eval_derivatives(parse("(x1 - 3)^0.5", {"x1"}), at1, {"x1"}, 1), DomainError);
  CHECK_THROWS_AS(eval_derivatives(parse("log(x1 - 2)", {"x1"}), at1, {"x1"}, 0), DomainError);
  CHECK_THROWS_AS(eval_derivatives(parse("sqrt(x1 - 2)", {"x1"}), at1, {"x1"}, 0), DomainError);
  CHECK_THROWS_AS(eval_derivatives(parse("sqrt(x1 - 1)", {"x1"}), at1, {"x1"}, 1), DomainError);
  CHECK_THROWS_AS(eval_derivatives(parse("(x1 - 3)^x1", {"x1"}), at1, {"x1"}, 1), DomainError);
  try {
    eval_derivatives(parse("2 + x1/(x1 - 1)", {"x1"}), at1, {"x1"}, 0);
    FAIL("expected a domain error");
  } catch (const DomainError& err) {
    CHECK(err.node() == "x1/(x1 - 1)");
  }
}

TEST_CASE("Schwarz symmetry: one stored entry per sorted multi-index") {
  auto e = parse("sin(x1*x2)*exp(x3) + x1^3*x2", kXYZ);
  auto b = eval_derivatives(e, {{"x1", 0.3}, {"x2", -0.4}, {"x3", 0.2}}, kXYZ, 3);
  CHECK(b.entries().size() == 20);  // C(3+3, 3)
  const std::vector<std::vector<std::string>> perms = {
      {"x1", "x2", "x3"}, {"x1", "x3", "x2"}, {"x2", "x1", "x3"},
      {"x2", "x3", "x1"}, {"x3", "x1", "x2"}, {"x3", "x2", "x1"}};
  const double ref = b.partial(perms[0]);
  for (const auto& p : perms) CHECK(b.partial(p) == ref);
  CHECK(b.partial({"x1", "x2", "x1"}) == b.partial({"x1", "x1", "x2"}));
}

TEST_CASE("property: polynomial partials match central differences of lower orders") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pt(-1.0, 1.0);
  const double h = 1e-4;
  for (int trial = 0; trial < 40; ++trial) {
    const auto src = testing::random_polynomial(rng, kXYZ, 4);
    const auto e = parse(src, kXYZ);
    std::map<std::string, double> env = {{"x1", pt(rng)}, {"x2", pt(rng)}, {"x3", pt(rng)}};
    const auto full = eval_derivatives(e, env, kXYZ, 3);
    for (const auto& [key, value] : full.entries()) {
      if (key.empty()) continue;
      // Remove one variable from the multi-index and difference along it.
      std::vector<std::string> lower;
      for (std::size_t k = 1; k < key.size(); ++k) lower.push_back(kXYZ[key[k]]);
      const std::string& along = kXYZ[key[0]];
      auto shifted = [&](double dx) {
        auto env2 = env;
        env2[along] += dx;
        return eval_derivatives(e, env2, kXYZ, static_cast<int>(lower.size())).partial(lower);
      };
      const double fd = (shifted(h) - shifted(-h)) / (2 * h);
      INFO(src);
      CHECK(std::abs(fd - value) <= 1e-6 * std::max(1.0, std::abs(value)));
    }
  }
}

TEST_CASE("property: linearity is exact") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pt(-1.0, 1.0);
  const double coeffs[][2] = {{3.0, -2.0}, {0.5, 7.0}, {-1.25, 0.75}};
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = testing::random_smooth(rng, kXYZ, 3);
    const auto g = testing::random_smooth(rng, kXYZ, 3);
    std::map<std::string, double> env = {{"x1", pt(rng)}, {"x2", pt(rng)}, {"x3", pt(rng)}};
    auto bf = eval_derivatives(parse(f, kXYZ), env, kXYZ, 3).entries();
    auto bg = eval_derivatives(parse(g, kXYZ), env, kXYZ, 3).entries();
    for (const auto& ab : coeffs) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g*(", ab[0]);
      std::string combo = buf + f + ") + ";
      std::snprintf(buf, sizeof buf, "%.17g*(", ab[1]);
      combo += buf + g + ")";
      auto bc = eval_derivatives(parse(combo, kXYZ), env, kXYZ, 3).entries();
      for (const auto& [key, v] : bc) CHECK(v == ab[0] * bf[key] + ab[1] * bg[key]);
    }
  }
}

TEST_CASE("concurrent evaluation of one expression") {
  const auto e = parse("exp(sin(x1)*x2) + log(2 + x3^2)", kXYZ);
  const std::map<std::string, double> env = {{"x1", 0.4}, {"x2", -0.3}, {"x3", 0.9}};
  const auto ref = eval_derivatives(e, env, kXYZ, 3).entries();
  std::vector<std::thread> pool;
  std::vector<int> ok(4, 0);
  for (int t = 0; t < 4; ++t)
    pool.emplace_back([&, t] {
      bool same = true;
      for (int k = 0; k < 50; ++k) same = same && eval_derivatives(e, env, kXYZ, 3).entries() == ref;
      ok[static_cast<std::size_t>(t)] = same;
    });
  for (auto& th : pool) th.join();
  for (int v : ok) CHECK(v == 1);
}
