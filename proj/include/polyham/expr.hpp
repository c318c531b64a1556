#pragma once

// Scalar expression DSL over named coordinates.
//
// Grammar (precedence high to low):
//   primary := number | name | name '(' expr ')' | '(' expr ')'
//   power   := primary [ '^' unary ]          (right associative)
//   unary   := '-' unary | power
//   term    := unary { ('*' | '/') unary }
//   expr    := term { ('+' | '-') term }
// Functions: sin cos tan exp log sqrt sinh cosh.

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "polyham/jet.hpp"

namespace polyham {

enum class NodeKind { constant, variable, negate, add, subtract, multiply, divide, power, call };
enum class Function { sin, cos, tan, exp, log, sqrt, sinh, cosh };

struct Node {
  NodeKind kind;
  double value = 0.0;        // constant
  std::size_t var = 0;       // variable: index into the declared variables
  Function fn = Function::sin;
  std::shared_ptr<const Node> lhs, rhs;  // unary ops and calls use lhs only
  std::size_t offset = 0;    // byte offset in the source text
};

bool same_tree(const Node& a, const Node& b);

class Expression {
 public:
  Expression() = default;

  const Node& root() const { return *root_; }
  const std::vector<std::string>& variables() const { return *vars_; }
  const std::string& source() const { return source_; }

  // True when the expression references the variable at this index.
  bool uses(std::size_t var) const;
  bool is_constant() const;

  // Evaluates with one jet per declared variable (all from the same space).
  Jet eval(std::span<const Jet> vars) const;
  double eval(std::span<const double> vars) const;

  // Minimal-parentheses canonical text.
  std::string unparse() const;

  friend Expression parse(std::string_view source, std::span<const std::string> declared);
  friend bool operator==(const Expression& a, const Expression& b) {
    return *a.vars_ == *b.vars_ && same_tree(*a.root_, *b.root_);
  }

 private:
  std::shared_ptr<const Node> root_;
  std::shared_ptr<const std::vector<std::string>> vars_;
  std::string source_;
};

// Throws SyntaxError or UnknownIdentifier.
Expression parse(std::string_view source, std::span<const std::string> declared);
Expression parse(std::string_view source, std::initializer_list<std::string> declared);

std::string unparse(const Node& node, std::span<const std::string> vars);

// Value and every mixed partial up to `order`, keyed by sorted variable lists.
class DerivativeBundle {
 public:
  DerivativeBundle(std::vector<std::string> wrt, Jet jet);

  double value() const { return jet_.value(); }
  int order() const { return jet_.order(); }
  const std::vector<std::string>& wrt() const { return wrt_; }

  // Partial with respect to the listed variables, in any order (repeats allowed).
  double partial(std::span<const std::string> names) const;
  double partial(std::initializer_list<std::string> names) const;

  // Every stored entry: sorted variable-index list -> derivative.
  std::map<std::vector<std::size_t>, double> entries() const;

 private:
  std::vector<std::string> wrt_;
  Jet jet_;
};

// `env` must bind every declared variable; `wrt` lists the differentiation variables.
DerivativeBundle eval_derivatives(const Expression& expr, const std::map<std::string, double>& env,
                                  std::span<const std::string> wrt, int order);
DerivativeBundle eval_derivatives(const Expression& expr, const std::map<std::string, double>& env,
                                  std::initializer_list<std::string> wrt, int order);

}  // namespace polyham
