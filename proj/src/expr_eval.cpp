#include <algorithm>
#include <cmath>
#include <vector>

#include "polyham/errors.hpp"
#include "polyham/expr.hpp"

namespace polyham {

namespace {

struct Evaluator {
  std::span<const Jet> vars;
  const std::vector<std::string>& names;
  const JetSpace& space;
  int order;

  [[noreturn]] void fail(const Node& n, const std::string& why) const {
    throw DomainError(polyham::unparse(n, names), why);
  }

  Jet checked_compose(const Node& n, const Jet& u, const std::vector<double>& fd) const {
    for (double v : fd)
      if (!std::isfinite(v)) fail(n, "derivative not finite at this point");
    return compose(u, fd);
  }

  Jet reciprocal(const Node& n, const Jet& u) const {
    const double u0 = u.value();
    if (u0 == 0.0) fail(n, "division by zero");
    std::vector<double> fd(static_cast<std::size_t>(u.order()) + 1);
    double f = 1.0 / u0;
    for (std::size_t k = 0; k < fd.size(); ++k) {
      fd[k] = f;
      f *= -static_cast<double>(k + 1) / u0;
    }
    return checked_compose(n, u, fd);
  }

  Jet real_power(const Node& n, const Jet& u, double q) const {
    const double u0 = u.value();
    if (u0 < 0.0) fail(n, "non-integer power of a negative base");
    std::vector<double> fd(static_cast<std::size_t>(u.order()) + 1);
    double coef = 1.0;
    for (std::size_t k = 0; k < fd.size(); ++k) {
      fd[k] = coef * std::pow(u0, q - static_cast<double>(k));
      coef *= q - static_cast<double>(k);
    }
    return checked_compose(n, u, fd);
  }

  Jet integer_power(const Node& n, Jet base, long long q) const {
    if (q < 0) return reciprocal(n, integer_power(n, std::move(base), -q));
    Jet result = Jet::constant(space, 1.0, order);
    while (q > 0) {
      if (q & 1) result = result * base;
      q >>= 1;
      if (q > 0) base = base * base;
    }
    return result;
  }

  Jet call(const Node& n, const Jet& u) const {
    const double u0 = u.value();
    const std::size_t r = static_cast<std::size_t>(u.order());
    std::vector<double> fd(r + 1);
    switch (n.fn) {
      case Function::sin: {
        const double cyc[4] = {std::sin(u0), std::cos(u0), -std::sin(u0), -std::cos(u0)};
        for (std::size_t k = 0; k <= r; ++k) fd[k] = cyc[k % 4];
        break;
      }
      case Function::cos: {
        const double cyc[4] = {std::cos(u0), -std::sin(u0), -std::cos(u0), std::sin(u0)};
        for (std::size_t k = 0; k <= r; ++k) fd[k] = cyc[k % 4];
        break;
      }
      case Function::exp:
        std::fill(fd.begin(), fd.end(), std::exp(u0));
        break;
      case Function::sinh:
      case Function::cosh: {
        const double s = std::sinh(u0), c = std::cosh(u0);
        const bool odd_first = n.fn == Function::sinh;
        for (std::size_t k = 0; k <= r; ++k) fd[k] = ((k % 2 == 0) == odd_first) ? s : c;
        break;
      }
      case Function::log: {
        if (u0 <= 0.0) fail(n, "log of a non-positive value");
        fd[0] = std::log(u0);
        double f = 1.0 / u0;
        for (std::size_t k = 1; k <= r; ++k) {
          fd[k] = f;
          f *= -static_cast<double>(k) / u0;
        }
        break;
      }
      case Function::sqrt:
        if (u0 < 0.0) fail(n, "sqrt of a negative value");
        if (u0 == 0.0 && r > 0) fail(n, "sqrt is not differentiable at zero");
        return real_power(n, u, 0.5);
      case Function::tan: {
        // d^k tan = P_k(tan), P_0(T) = T, P_{k+1}(T) = P_k'(T) (1 + T^2).
        const double t = std::tan(u0);
        if (!std::isfinite(t)) fail(n, "tan pole");
        std::vector<double> poly = {0.0, 1.0};
        for (std::size_t k = 0; k <= r; ++k) {
          double v = 0.0;
          for (std::size_t i = poly.size(); i-- > 0;) v = v * t + poly[i];
          fd[k] = v;
          std::vector<double> next(poly.size() + 1, 0.0);
          for (std::size_t i = 1; i < poly.size(); ++i) {
            next[i - 1] += static_cast<double>(i) * poly[i];
            next[i + 1] += static_cast<double>(i) * poly[i];
          }
          poly = std::move(next);
        }
        break;
      }
    }
    return checked_compose(n, u, fd);
  }

  Jet eval(const Node& n) const {
    switch (n.kind) {
      case NodeKind::constant:
        return Jet::constant(space, n.value, order);
      case NodeKind::variable:
        return vars[n.var];
      case NodeKind::negate:
        return -eval(*n.lhs);
      case NodeKind::add:
        return eval(*n.lhs) + eval(*n.rhs);
      case NodeKind::subtract:
        return eval(*n.lhs) - eval(*n.rhs);
      case NodeKind::multiply:
        return eval(*n.lhs) * eval(*n.rhs);
      case NodeKind::divide:
        return eval(*n.lhs) * reciprocal(n, eval(*n.rhs));
      case NodeKind::call:
        return call(n, eval(*n.lhs));
      case NodeKind::power: {
        Jet base = eval(*n.lhs);
        Jet expo = eval(*n.rhs);
        if (std::all_of(expo.derivatives().begin() + 1, expo.derivatives().end(),
                        [](double v) { return v == 0.0; })) {
          const double q = expo.value();
          if (q == std::trunc(q) && std::abs(q) < 9.0e15)
            return integer_power(n, std::move(base), static_cast<long long>(q));
          return real_power(n, base, q);
        }
        if (base.value() <= 0.0) fail(n, "variable exponent needs a positive base");
        std::vector<double> logd(static_cast<std::size_t>(base.order()) + 1);
        logd[0] = std::log(base.value());
        double f = 1.0 / base.value();
        for (std::size_t k = 1; k < logd.size(); ++k) {
          logd[k] = f;
          f *= -static_cast<double>(k) / base.value();
        }
        Jet e = expo * compose(base, logd);
        std::vector<double> expd(static_cast<std::size_t>(e.order()) + 1, std::exp(e.value()));
        return checked_compose(n, e, expd);
      }
    }
    fail(n, "unknown node");
  }
};

}  // namespace

Jet Expression::eval(std::span<const Jet> vars) const {
  if (vars.size() != vars_->size()) throw std::invalid_argument("variable count mismatch");
  const JetSpace* space = nullptr;
  int order = 0;
  if (!vars.empty()) {
    space = &vars[0].space();
    order = vars[0].order();
    for (const auto& v : vars) order = std::min(order, v.order());
  } else {
    space = &JetSpace::get(0, 0);
  }
  return Evaluator{vars, *vars_, *space, order}.eval(*root_);
}

double Expression::eval(std::span<const double> vars) const {
  const JetSpace& space = JetSpace::get(0, 0);
  std::vector<Jet> jets;
  jets.reserve(vars.size());
  for (double v : vars) jets.push_back(Jet::constant(space, v, 0));
  if (jets.size() != vars_->size()) throw std::invalid_argument("variable count mismatch");
  return Evaluator{jets, *vars_, space, 0}.eval(*root_).value();
}

DerivativeBundle::DerivativeBundle(std::vector<std::string> wrt, Jet jet)
    : wrt_(std::move(wrt)), jet_(std::move(jet)) {}

double DerivativeBundle::partial(std::span<const std::string> names) const {
  std::vector<int> exps(wrt_.size(), 0);
  for (const auto& name : names) {
    auto it = std::find(wrt_.begin(), wrt_.end(), name);
    if (it == wrt_.end()) throw std::invalid_argument("not a differentiation variable: " + name);
    ++exps[static_cast<std::size_t>(it - wrt_.begin())];
  }
  return jet_.partial(exps);
}

double DerivativeBundle::partial(std::initializer_list<std::string> names) const {
  std::vector<std::string> v(names);
  return partial(std::span<const std::string>(v));
}

std::map<std::vector<std::size_t>, double> DerivativeBundle::entries() const {
  std::map<std::vector<std::size_t>, double> out;
  const auto& space = jet_.space();
  for (std::size_t m = 0; m < jet_.derivatives().size(); ++m) {
    std::vector<std::size_t> key;
    auto e = space.exponents(m);
    for (std::size_t v = 0; v < e.size(); ++v) key.insert(key.end(), e[v], v);
    out.emplace(std::move(key), jet_.derivative_at(m));
  }
  return out;
}

DerivativeBundle eval_derivatives(const Expression& expr, const std::map<std::string, double>& env,
                                  std::span<const std::string> wrt, int order) {
  if (order < 0 || order > 3) throw std::invalid_argument("derivative order must be 0..3");
  const JetSpace& space = JetSpace::get(wrt.size(), order);
  std::vector<Jet> vars;
  for (const auto& name : expr.variables()) {
    auto it = env.find(name);
    if (it == env.end()) throw std::invalid_argument("unbound variable: " + name);
    auto w = std::find(wrt.begin(), wrt.end(), name);
    vars.push_back(w == wrt.end()
                       ? Jet::constant(space, it->second, order)
                       : Jet::variable(space, static_cast<std::size_t>(w - wrt.begin()),
                                       it->second, order));
  }
  for (const auto& name : wrt)
    if (std::find(expr.variables().begin(), expr.variables().end(), name) ==
        expr.variables().end())
      throw std::invalid_argument("differentiation variable not declared: " + name);
  // Expressions with no declared variables still need the target space.
  Jet result = vars.empty() ? Jet::constant(space, expr.eval(std::span<const double>{}), order)
                            : expr.eval(vars);
  return DerivativeBundle(std::vector<std::string>(wrt.begin(), wrt.end()), std::move(result));
}

DerivativeBundle eval_derivatives(const Expression& expr, const std::map<std::string, double>& env,
                                  std::initializer_list<std::string> wrt, int order) {
  std::vector<std::string> v(wrt);
  return eval_derivatives(expr, env, std::span<const std::string>(v), order);
}

}  // namespace polyham
