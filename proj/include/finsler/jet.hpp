#pragma once

// Truncated multivariate Taylor arithmetic.
//
// A Jet holds the Taylor coefficients c_a of a smooth function about a base
// point, indexed by monomials a of total degree <= order:
//
//     f(p + h) = sum_a c_a h^a + O(|h|^{order+1})
//
// Products and elementary functions are exact up to roundoff at every
// retained order, so nested derivatives of composite expressions (metric ->
// spray -> connection -> curvature) come out without truncation error.
// Differentiating a jet lowers its order by one.

#include <boost/container/small_vector.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace finsler {

/// Largest total order the engine builds monomial tables for.
inline constexpr int kMaxJetOrder = 6;

/// Monomial tables for `vars` variables up to total degree `max_order`.
/// Monomials are stored in graded order, so the monomials of degree <= k form
/// a prefix of length size(k). Instances are interned and live for the whole
/// process.
class JetSpace {
 public:
  struct Term {
    std::int32_t lhs;
    std::int32_t rhs;
    std::int32_t out;
  };

  static const JetSpace& get(int vars, int max_order);

  int vars() const { return vars_; }
  int max_order() const { return max_order_; }
  int size(int order) const { return prefix_[static_cast<std::size_t>(order) + 1]; }
  int degree(int idx) const { return degree_[static_cast<std::size_t>(idx)]; }
  std::span<const std::uint8_t> exponents(int idx) const {
    return {exps_.data() + static_cast<std::size_t>(idx) * vars_, static_cast<std::size_t>(vars_)};
  }
  /// Index of monomial idx * h_var, or -1 past max_order.
  int shifted(int idx, int var) const { return shift_[static_cast<std::size_t>(idx) * vars_ + var]; }
  /// -1 when the monomial exceeds max_order.
  int index_of(std::span<const int> exps) const;
  /// All (lhs, rhs) pairs whose product has degree <= order.
  std::span<const Term> products(int order) const {
    return {terms_.data(), static_cast<std::size_t>(term_prefix_[static_cast<std::size_t>(order) + 1])};
  }

  JetSpace(int vars, int max_order);

 private:
  int vars_;
  int max_order_;
  std::vector<std::uint8_t> exps_;
  std::vector<int> degree_;
  std::vector<int> prefix_;
  std::vector<int> shift_;
  std::vector<Term> terms_;
  std::vector<int> term_prefix_;
};

class Jet {
 public:
  using Storage = boost::container::small_vector<double, 16>;

  /// Constants carry no space and combine with jets of any space.
  static constexpr int kConstantOrder = 1 << 20;

  Jet() : Jet(0.0) {}
  Jet(double value) : space_(nullptr), order_(kConstantOrder), c_{value} {}  // NOLINT implicit
  Jet(const JetSpace& space, int order, double value = 0.0);

  /// The coordinate function h_var shifted to `value`.
  static Jet variable(const JetSpace& space, int order, int var, double value);

  bool is_constant() const { return space_ == nullptr; }
  const JetSpace* space() const { return space_; }
  int order() const { return order_; }
  double value() const { return c_[0]; }
  std::size_t size() const { return c_.size(); }
  double operator[](std::size_t i) const { return c_[i]; }
  double& operator[](std::size_t i) { return c_[i]; }

  Jet truncated(int order) const;
  /// d/dh_var; result order is one lower. Throws DomainError at order 0.
  Jet derivative(int var) const;
  /// Mixed partial derivative at the base point for the exponent multi-index.
  double partial(std::span<const int> multi_index) const;

  Jet operator-() const;
  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator*=(double s);
  /// *this += s * a * b without a temporary.
  Jet& add_product(const Jet& a, const Jet& b, double s = 1.0);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(const Jet& a, const Jet& b);

 private:
  friend Jet compose(const Jet& a, std::span<const double> derivs);

  const JetSpace* space_;
  int order_;
  Storage c_;
};

/// f(a) from f's derivatives f^(k)(a.value()), k = 0..a.order().
Jet compose(const Jet& a, std::span<const double> derivs);

Jet reciprocal(const Jet& a);
Jet sqrt(const Jet& a);
Jet pow(const Jet& a, double exponent);
Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sin(const Jet& a);
Jet cos(const Jet& a);

}  // namespace finsler
