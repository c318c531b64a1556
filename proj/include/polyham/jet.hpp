#pragma once

// Truncated multivariate Taylor jets.
//
// A Jet over k variables with valid order r stores every partial derivative
// d^alpha f of total degree |alpha| <= r at the expansion point, one entry per
// distinct multi-index (so mixed partials are symmetric by construction).
// Arithmetic propagates derivatives exactly (forward mode); no differencing.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace polyham {

// Graded monomial layout shared by all jets with the same (nvars, max order).
class JetSpace {
 public:
  static const JetSpace& get(std::size_t nvars, int max_order);

  std::size_t nvars() const { return nvars_; }
  int max_order() const { return max_order_; }
  std::size_t size() const { return degree_.size(); }

  // Number of monomials of degree <= order (monomials are stored graded).
  std::size_t count_upto(int order) const { return prefix_[static_cast<std::size_t>(order)]; }
  int degree(std::size_t mono) const { return degree_[mono]; }
  std::span<const std::uint8_t> exponents(std::size_t mono) const {
    return {exps_.data() + mono * nvars_, nvars_};
  }
  // Index of the monomial with the given exponents; size() if absent.
  std::size_t index_of(std::span<const int> exps) const;
  std::size_t variable_index(std::size_t var) const { return 1 + var; }
  // alpha! for the monomial.
  double factorial(std::size_t mono) const { return factorial_[mono]; }

  struct Product {
    std::uint32_t lhs, rhs, out;
    double weight;  // multinomial (alpha+beta)! / (alpha! beta!)
  };
  // Products whose output degree <= order form a prefix of products().
  std::span<const Product> products(int order) const {
    return {products_.data(), product_prefix_[static_cast<std::size_t>(order)]};
  }
  // For d/dx_var: source monomial of each target monomial beta (beta + e_var).
  std::span<const std::uint32_t> shift(std::size_t var) const {
    return {shift_.data() + var * size(), size()};
  }

 private:
  JetSpace(std::size_t nvars, int max_order);

  std::size_t nvars_;
  int max_order_;
  std::vector<std::uint8_t> exps_;
  std::vector<int> degree_;
  std::vector<double> factorial_;
  std::vector<std::size_t> prefix_;
  std::vector<Product> products_;
  std::vector<std::size_t> product_prefix_;
  std::vector<std::uint32_t> shift_;
};

class Jet {
 public:
  Jet() = default;

  static Jet constant(const JetSpace& space, double value, int order);
  static Jet variable(const JetSpace& space, std::size_t var, double value, int order);

  bool valid() const { return space_ != nullptr; }
  const JetSpace& space() const { return *space_; }
  int order() const { return order_; }
  double value() const { return d_[0]; }

  // d^alpha f for the monomial index (graded order).
  double derivative_at(std::size_t mono) const { return d_[mono]; }
  std::span<const double> derivatives() const { return d_; }
  // d^alpha f for an exponent vector.
  double partial(std::span<const int> exps) const;

  // Exact partial derivative with respect to one variable; order drops by one.
  Jet derivative(std::size_t var) const;
  // Same jet truncated to a lower order.
  Jet truncated(int order) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator*=(double s);
  Jet& operator+=(double s) {
    d_[0] += s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator-(Jet a) { return a *= -1.0; }

  // f(u) given f^(k)(u.value()) for k = 0..order.
  friend Jet compose(const Jet& u, std::span<const double> fderivs);

  bool is_zero() const;

 private:
  Jet(const JetSpace& space, int order);
  void require_same_space(const Jet& o) const;

  const JetSpace* space_ = nullptr;
  int order_ = 0;
  std::vector<double> d_;
};

}  // namespace polyham
