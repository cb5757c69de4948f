#pragma once

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "nilkill/jet.hpp"

namespace nilkill {

using Point = std::vector<double>;

enum class Variance { Upper, Lower };

/// Dense tensor with dim^rank components, row-major in the slot order.
template <typename T>
class BasicTensor {
 public:
  BasicTensor() = default;
  BasicTensor(int dim, std::vector<Variance> variance, const T& fill, Point base = {})
      : dim_(dim), variance_(std::move(variance)), base_(std::move(base)) {
    std::size_t count = 1;
    for (std::size_t s = 0; s < variance_.size(); ++s) count *= static_cast<std::size_t>(dim_);
    data_.assign(count, fill);
  }

  int dim() const noexcept { return dim_; }
  int rank() const noexcept { return static_cast<int>(variance_.size()); }
  const std::vector<Variance>& variance() const noexcept { return variance_; }
  const Point& base() const noexcept { return base_; }

  std::vector<T>& data() noexcept { return data_; }
  const std::vector<T>& data() const noexcept { return data_; }

  std::size_t offset(std::initializer_list<int> idx) const {
    if (static_cast<int>(idx.size()) != rank()) throw std::invalid_argument("tensor rank mismatch");
    std::size_t k = 0;
    for (int i : idx) k = k * dim_ + static_cast<std::size_t>(i);
    return k;
  }

  template <typename... I>
  T& operator()(I... idx) {
    return data_[offset({static_cast<int>(idx)...})];
  }
  template <typename... I>
  const T& operator()(I... idx) const {
    return data_[offset({static_cast<int>(idx)...})];
  }

 private:
  int dim_ = 0;
  std::vector<Variance> variance_;
  Point base_;
  std::vector<T> data_;
};

using TensorValue = BasicTensor<double>;
using JetTensor = BasicTensor<Jet>;

/// Componentwise constant terms.
TensorValue value_of(const JetTensor& t);

/// Contracts slot `slot` with g^{ab} (raise) or g_{ab} (lower).
TensorValue raise_index(const TensorValue& t, int slot, const Eigen::MatrixXd& inverse_metric);
TensorValue lower_index(const TensorValue& t, int slot, const Eigen::MatrixXd& metric);

/// Full contraction T_{...} S^{...} over identical index layouts of opposite variance.
double contract(const TensorValue& lower, const TensorValue& upper);

/// Raises every lower slot of `t`, then contracts with `t`.
double full_square(const TensorValue& t, const Eigen::MatrixXd& inverse_metric);

double frobenius_norm(const TensorValue& t);

}  // namespace nilkill
