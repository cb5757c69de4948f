#pragma once

// Truncated multivariate Taylor arithmetic.
//
// A Jet of dimension n and order m stores the Taylor coefficients
// c_alpha = (d^alpha f)(p) / alpha! for every multi-index |alpha| <= m.
// Coefficients are laid out in graded order (all degree 0, then degree 1,
// ...), so the table of order m' < m is a prefix of the table of order m and
// truncation is a resize.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace nilkill {

class MultiIndexTable {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  struct Product {
    std::uint32_t lhs;
    std::uint32_t rhs;
    std::uint32_t out;
  };

  /// Shared, cached table for (dim, order). Thread-safe.
  static std::shared_ptr<const MultiIndexTable> get(int dim, int order);

  int dim() const noexcept { return dim_; }
  int order() const noexcept { return order_; }
  std::size_t size() const noexcept { return degree_.size(); }

  /// Number of multi-indices with total degree <= order.
  std::size_t size_up_to(int order) const;

  std::span<const std::uint8_t> exponents(std::size_t k) const;
  int degree(std::size_t k) const { return degree_[k]; }

  /// Index of alpha, or npos when |alpha| exceeds the order.
  std::size_t find(std::span<const int> alpha) const;

  /// Index of alpha_k + e_var, or npos when that exceeds the order.
  std::size_t shift(int var, std::size_t k) const { return shift_[var * size() + k]; }

  /// (i, j, k) with alpha_i + alpha_j = alpha_k, restricted to |alpha_k| <= order.
  std::span<const Product> products() const { return products_; }

  MultiIndexTable(int dim, int order);

 private:
  int dim_;
  int order_;
  std::vector<std::uint8_t> exponents_;  // size() * dim_
  std::vector<int> degree_;
  std::vector<std::size_t> shift_;
  std::vector<Product> products_;
};

class Jet {
 public:
  /// The constant 0 in one variable at order 0; a placeholder until assigned.
  Jet();
  Jet(std::shared_ptr<const MultiIndexTable> table, double value = 0.0);

  static Jet constant(int dim, int order, double value);
  static Jet variable(int dim, int order, int var, double value);

  int dim() const noexcept { return table_->dim(); }
  int order() const noexcept { return table_->order(); }
  const std::shared_ptr<const MultiIndexTable>& table() const noexcept { return table_; }

  double value() const noexcept { return coeffs_[0]; }
  std::span<const double> coefficients() const noexcept { return coeffs_; }
  std::span<double> coefficients() noexcept { return coeffs_; }

  /// Taylor coefficient at alpha (d^alpha f / alpha!). Zero beyond the order.
  double coefficient(std::span<const int> alpha) const;
  double coefficient(std::initializer_list<int> alpha) const;

  /// The partial derivative d^alpha f at the base point.
  double partial(std::span<const int> alpha) const;
  double partial(std::initializer_list<int> alpha) const;

  /// First partial d f / d x_var.
  double d(int var) const;

  /// Jet of d f / d x_var, one order lower. Throws OrderError at order 0.
  Jet derivative(int var) const;

  /// Same function, truncated to a lower (or equal) order.
  Jet truncated(int order) const;

  /// The nilpotent part f - f(p).
  Jet nilpotent() const;

  Jet operator-() const;
  Jet& operator+=(const Jet& other);
  Jet& operator-=(const Jet& other);
  Jet& operator*=(const Jet& other);
  Jet& operator/=(const Jet& other);
  Jet& operator+=(double s);
  Jet& operator-=(double s);
  Jet& operator*=(double s);
  Jet& operator/=(double s);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator+(double s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, double s) { return a -= s; }
  friend Jet operator-(double s, const Jet& a) { return (-a) += s; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, double s) { return a /= s; }
  friend Jet operator/(double s, const Jet& a);

 private:
  void require_compatible(const Jet& other) const;

  std::shared_ptr<const MultiIndexTable> table_;
  std::vector<double> coeffs_;
};

/// Accumulates a*b into acc without allocating a temporary.
void multiply_add(Jet& acc, const Jet& a, const Jet& b);

Jet reciprocal(const Jet& x);
Jet pow(const Jet& x, int exponent);
Jet exp(const Jet& x);
Jet log(const Jet& x);
Jet sqrt(const Jet& x);
Jet sin(const Jet& x);
Jet cos(const Jet& x);

/// Coordinate jets at `point`: jet i has value point[i] and unit slope along e_i.
std::vector<Jet> seed(std::span<const double> point, int order);

}  // namespace nilkill
