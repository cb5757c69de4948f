#include "nilkill/tensor.hpp"

#include <cmath>

namespace nilkill {

namespace {

TensorValue contract_slot(const TensorValue& t, int slot, const Eigen::MatrixXd& m,
                          Variance result) {
  if (slot < 0 || slot >= t.rank()) throw std::invalid_argument("tensor slot out of range");
  const int n = t.dim();
  auto variance = t.variance();
  variance[slot] = result;
  TensorValue out(n, variance, 0.0, t.base());

  std::size_t stride = 1;
  for (int s = t.rank() - 1; s > slot; --s) stride *= static_cast<std::size_t>(n);
  const std::size_t block = stride * static_cast<std::size_t>(n);
  const auto& in = t.data();
  auto& dst = out.data();
  for (std::size_t outer = 0; outer < in.size(); outer += block) {
    for (std::size_t inner = 0; inner < stride; ++inner) {
      for (int a = 0; a < n; ++a) {
        double sum = 0.0;
        for (int b = 0; b < n; ++b) sum += m(a, b) * in[outer + b * stride + inner];
        dst[outer + a * stride + inner] = sum;
      }
    }
  }
  return out;
}

}  // namespace

TensorValue value_of(const JetTensor& t) {
  TensorValue out(t.dim(), t.variance(), 0.0, t.base());
  for (std::size_t k = 0; k < t.data().size(); ++k) out.data()[k] = t.data()[k].value();
  return out;
}

TensorValue raise_index(const TensorValue& t, int slot, const Eigen::MatrixXd& inverse_metric) {
  if (t.variance().at(slot) != Variance::Lower) throw std::invalid_argument("slot is not lower");
  return contract_slot(t, slot, inverse_metric, Variance::Upper);
}

TensorValue lower_index(const TensorValue& t, int slot, const Eigen::MatrixXd& metric) {
  if (t.variance().at(slot) != Variance::Upper) throw std::invalid_argument("slot is not upper");
  return contract_slot(t, slot, metric, Variance::Lower);
}

double contract(const TensorValue& lower, const TensorValue& upper) {
  if (lower.data().size() != upper.data().size())
    throw std::invalid_argument("contraction of tensors with different shapes");
  for (int s = 0; s < lower.rank(); ++s)
    if (lower.variance()[s] == upper.variance()[s])
      throw std::invalid_argument("contraction requires opposite variance in every slot");
  double sum = 0.0;
  for (std::size_t k = 0; k < lower.data().size(); ++k) sum += lower.data()[k] * upper.data()[k];
  return sum;
}

double full_square(const TensorValue& t, const Eigen::MatrixXd& inverse_metric) {
  TensorValue up = t;
  for (int s = 0; s < t.rank(); ++s) up = raise_index(up, s, inverse_metric);
  return contract(t, up);
}

double frobenius_norm(const TensorValue& t) {
  double sum = 0.0;
  for (double v : t.data()) sum += v * v;
  return std::sqrt(sum);
}

}  // namespace nilkill
