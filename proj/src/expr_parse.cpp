#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <string>

#include "polyham/errors.hpp"
#include "polyham/expr.hpp"

namespace polyham {

namespace {

struct FunctionName {
  std::string_view name;
  Function fn;
};

constexpr FunctionName kFunctions[] = {
    {"sin", Function::sin},   {"cos", Function::cos},   {"tan", Function::tan},
    {"exp", Function::exp},   {"log", Function::log},   {"sqrt", Function::sqrt},
    {"sinh", Function::sinh}, {"cosh", Function::cosh},
};

std::string_view function_name(Function fn) {
  for (const auto& f : kFunctions)
    if (f.fn == fn) return f.name;
  return "?";
}

using NodePtr = std::shared_ptr<const Node>;

class Parser {
 public:
  Parser(std::string_view src, std::span<const std::string> vars) : src_(src), vars_(vars) {}

  NodePtr parse_all() {
    NodePtr e = expr();
    skip_space();
    if (pos_ < src_.size()) throw SyntaxError(pos_, "operator or end of input");
    return e;
  }

 private:
  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  char peek() {
    skip_space();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  static NodePtr make(NodeKind k, std::size_t off, NodePtr l = nullptr, NodePtr r = nullptr) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->offset = off;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      char c = peek();
      if (c != '+' && c != '-') return lhs;
      std::size_t off = pos_++;
      lhs = make(c == '+' ? NodeKind::add : NodeKind::subtract, off, lhs, term());
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      char c = peek();
      if (c != '*' && c != '/') return lhs;
      std::size_t off = pos_++;
      lhs = make(c == '*' ? NodeKind::multiply : NodeKind::divide, off, lhs, unary());
    }
  }

  NodePtr unary() {
    if (peek() == '-') {
      std::size_t off = pos_++;
      return make(NodeKind::negate, off, unary());
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (peek() == '^') {
      std::size_t off = pos_++;
      return make(NodeKind::power, off, base, unary());
    }
    return base;
  }

  NodePtr primary() {
    char c = peek();
    std::size_t start = pos_;
    if (c == '(') {
      ++pos_;
      NodePtr inner = expr();
      if (peek() != ')') throw SyntaxError(pos_, "')'");
      ++pos_;
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      std::string name(src_.substr(start, pos_ - start));
      if (peek() == '(') {
        auto it = std::find_if(std::begin(kFunctions), std::end(kFunctions),
                               [&](const FunctionName& f) { return f.name == name; });
        if (it == std::end(kFunctions)) throw UnknownIdentifier(name, start);
        ++pos_;
        NodePtr arg = expr();
        if (peek() != ')') throw SyntaxError(pos_, "')'");
        ++pos_;
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::call;
        n->fn = it->fn;
        n->lhs = std::move(arg);
        n->offset = start;
        return n;
      }
      auto it = std::find(vars_.begin(), vars_.end(), name);
      if (it == vars_.end()) throw UnknownIdentifier(name, start);
      auto n = std::make_shared<Node>();
      n->kind = NodeKind::variable;
      n->var = static_cast<std::size_t>(it - vars_.begin());
      n->offset = start;
      return n;
    }
    throw SyntaxError(pos_, "number, name or '('");
  }

  NodePtr number() {
    std::size_t start = pos_;
    auto digits = [&] {
      std::size_t b = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      return pos_ - b;
    };
    std::size_t whole = digits();
    std::size_t frac = 0;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      frac = digits();
    }
    if (whole + frac == 0) throw SyntaxError(start, "number");
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) throw SyntaxError(pos_, "exponent digits");
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, v);
    if (ec != std::errc() || !std::isfinite(v)) throw SyntaxError(start, "finite number");
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::constant;
    n->value = v;
    n->offset = start;
    return n;
  }

  std::string_view src_;
  std::span<const std::string> vars_;
  std::size_t pos_ = 0;
};

int precedence(const Node& n) {
  switch (n.kind) {
    case NodeKind::add:
    case NodeKind::subtract:
      return 1;
    case NodeKind::multiply:
    case NodeKind::divide:
      return 2;
    case NodeKind::negate:
      return 3;
    case NodeKind::power:
      return 4;
    default:
      return 5;
  }
}

void emit(const Node& n, std::span<const std::string> vars, std::string& out);

void emit_wrapped(const Node& n, bool wrap, std::span<const std::string> vars, std::string& out) {
  if (wrap) out += '(';
  emit(n, vars, out);
  if (wrap) out += ')';
}

void emit(const Node& n, std::span<const std::string> vars, std::string& out) {
  switch (n.kind) {
    case NodeKind::constant: {
      char buf[64];
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, n.value);
      out.append(buf, end);
      return;
    }
    case NodeKind::variable:
      out += n.var < vars.size() ? vars[n.var] : "?";
      return;
    case NodeKind::negate:
      out += '-';
      emit_wrapped(*n.lhs, precedence(*n.lhs) < 3, vars, out);
      return;
    case NodeKind::power:
      emit_wrapped(*n.lhs, precedence(*n.lhs) < 5, vars, out);
      out += '^';
      emit_wrapped(*n.rhs, precedence(*n.rhs) < 3, vars, out);
      return;
    case NodeKind::call:
      out += function_name(n.fn);
      emit_wrapped(*n.lhs, true, vars, out);
      return;
    default: {
      int p = precedence(n);
      emit_wrapped(*n.lhs, precedence(*n.lhs) < p, vars, out);
      switch (n.kind) {
        case NodeKind::add: out += " + "; break;
        case NodeKind::subtract: out += " - "; break;
        case NodeKind::multiply: out += '*'; break;
        default: out += '/'; break;
      }
      emit_wrapped(*n.rhs, precedence(*n.rhs) <= p, vars, out);
    }
  }
}

}  // namespace

bool same_tree(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case NodeKind::constant:
      return a.value == b.value;
    case NodeKind::variable:
      return a.var == b.var;
    case NodeKind::negate:
      return same_tree(*a.lhs, *b.lhs);
    case NodeKind::call:
      return a.fn == b.fn && same_tree(*a.lhs, *b.lhs);
    default:
      return same_tree(*a.lhs, *b.lhs) && same_tree(*a.rhs, *b.rhs);
  }
}

Expression parse(std::string_view source, std::span<const std::string> declared) {
  Expression e;
  e.vars_ = std::make_shared<const std::vector<std::string>>(declared.begin(), declared.end());
  e.source_ = std::string(source);
  e.root_ = Parser(source, *e.vars_).parse_all();
  return e;
}

Expression parse(std::string_view source, std::initializer_list<std::string> declared) {
  std::vector<std::string> v(declared);
  return parse(source, std::span<const std::string>(v));
}

std::string unparse(const Node& node, std::span<const std::string> vars) {
  std::string out;
  emit(node, vars, out);
  return out;
}

std::string Expression::unparse() const { return polyham::unparse(*root_, *vars_); }

namespace {
bool uses_var(const Node& n, std::size_t var) {
  switch (n.kind) {
    case NodeKind::constant:
      return false;
    case NodeKind::variable:
      return n.var == var;
    case NodeKind::negate:
    case NodeKind::call:
      return uses_var(*n.lhs, var);
    default:
      return uses_var(*n.lhs, var) || uses_var(*n.rhs, var);
  }
}
}  // namespace

bool Expression::uses(std::size_t var) const { return uses_var(*root_, var); }

bool Expression::is_constant() const {
  for (std::size_t v = 0; v < vars_->size(); ++v)
    if (uses(v)) return false;
  return true;
}

}  // namespace polyham
