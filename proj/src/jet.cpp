#include "nilkill/jet.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "nilkill/error.hpp"

namespace nilkill {

namespace {

constexpr int kMaxDim = 16;
constexpr int kMaxOrder = 8;

void append_degree(int dim, int remaining, int var, std::vector<std::uint8_t>& current,
                   std::vector<std::uint8_t>& out) {
  if (var == dim - 1) {
    current[var] = static_cast<std::uint8_t>(remaining);
    out.insert(out.end(), current.begin(), current.end());
    return;
  }
  for (int a = remaining; a >= 0; --a) {
    current[var] = static_cast<std::uint8_t>(a);
    append_degree(dim, remaining - a, var + 1, current, out);
  }
}

std::uint64_t encode(std::span<const std::uint8_t> alpha, int order) {
  std::uint64_t key = 0;
  for (auto it = alpha.rbegin(); it != alpha.rend(); ++it) key = key * (order + 1) + *it;
  return key;
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// f(x0 + h) = sum_k series[k] h^k, evaluated by Horner on the nilpotent part.
Jet compose(const Jet& x, const std::vector<double>& series) {
  const Jet h = x.nilpotent();
  Jet result(x.table(), series.back());
  for (int k = static_cast<int>(series.size()) - 2; k >= 0; --k) {
    result = result * h;
    result += series[k];
  }
  return result;
}

}  // namespace

MultiIndexTable::MultiIndexTable(int dim, int order) : dim_(dim), order_(order) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("jet dimension out of range");
  if (order < 0 || order > kMaxOrder) throw std::invalid_argument("jet order out of range");

  std::vector<std::uint8_t> current(dim, 0);
  for (int d = 0; d <= order; ++d) append_degree(dim, d, 0, current, exponents_);
  const std::size_t count = exponents_.size() / dim;
  degree_.resize(count);

  std::unordered_map<std::uint64_t, std::size_t> lookup;
  lookup.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    auto alpha = exponents(k);
    int deg = 0;
    for (auto a : alpha) deg += a;
    degree_[k] = deg;
    lookup.emplace(encode(alpha, order), k);
  }

  shift_.assign(static_cast<std::size_t>(dim) * count, npos);
  std::vector<std::uint8_t> work(dim);
  for (int var = 0; var < dim; ++var) {
    for (std::size_t k = 0; k < count; ++k) {
      if (degree_[k] == order) continue;
      auto alpha = exponents(k);
      std::copy(alpha.begin(), alpha.end(), work.begin());
      ++work[var];
      shift_[var * count + k] = lookup.at(encode(work, order));
    }
  }

  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < count; ++j) {
      if (degree_[i] + degree_[j] > order) continue;
      auto a = exponents(i);
      auto b = exponents(j);
      for (int v = 0; v < dim; ++v) work[v] = static_cast<std::uint8_t>(a[v] + b[v]);
      products_.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                           static_cast<std::uint32_t>(lookup.at(encode(work, order)))});
    }
  }
}

std::shared_ptr<const MultiIndexTable> MultiIndexTable::get(int dim, int order) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const MultiIndexTable>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{dim, order}];
  if (!slot) slot = std::make_shared<const MultiIndexTable>(dim, order);
  return slot;
}

std::size_t MultiIndexTable::size_up_to(int order) const {
  if (order < 0) return 0;
  if (order >= order_) return size();
  std::size_t k = 0;
  while (k < size() && degree_[k] <= order) ++k;
  return k;
}

std::span<const std::uint8_t> MultiIndexTable::exponents(std::size_t k) const {
  return {exponents_.data() + k * dim_, static_cast<std::size_t>(dim_)};
}

std::size_t MultiIndexTable::find(std::span<const int> alpha) const {
  if (static_cast<int>(alpha.size()) != dim_)
    throw std::invalid_argument("multi-index length does not match jet dimension");
  std::size_t k = 0;
  int deg = 0;
  for (int v = 0; v < dim_; ++v) {
    if (alpha[v] < 0) throw std::invalid_argument("negative multi-index entry");
    deg += alpha[v];
    for (int step = 0; step < alpha[v]; ++step) {
      if (deg > order_) return npos;
      k = shift(v, k);
    }
  }
  return k;
}

// --- Jet -------------------------------------------------------------------

Jet::Jet() : Jet(MultiIndexTable::get(1, 0)) {}

Jet::Jet(std::shared_ptr<const MultiIndexTable> table, double value)
    : table_(std::move(table)), coeffs_(table_->size(), 0.0) {
  coeffs_[0] = value;
}

Jet Jet::constant(int dim, int order, double value) {
  return Jet(MultiIndexTable::get(dim, order), value);
}

Jet Jet::variable(int dim, int order, int var, double value) {
  Jet j = constant(dim, order, value);
  if (order > 0) j.coeffs_[1 + var] = 1.0;
  return j;
}

double Jet::coefficient(std::span<const int> alpha) const {
  const auto k = table_->find(alpha);
  return k == MultiIndexTable::npos ? 0.0 : coeffs_[k];
}

double Jet::coefficient(std::initializer_list<int> alpha) const {
  return coefficient(std::span<const int>(alpha.begin(), alpha.size()));
}

double Jet::partial(std::span<const int> alpha) const {
  double scale = 1.0;
  for (int a : alpha) scale *= factorial(a);
  return coefficient(alpha) * scale;
}

double Jet::partial(std::initializer_list<int> alpha) const {
  return partial(std::span<const int>(alpha.begin(), alpha.size()));
}

double Jet::d(int var) const {
  if (order() < 1) throw OrderError("first derivative requested from an order-0 jet");
  return coeffs_[1 + var];
}

Jet Jet::derivative(int var) const {
  if (order() < 1) throw OrderError("cannot differentiate an order-0 jet");
  Jet out(MultiIndexTable::get(dim(), order() - 1));
  for (std::size_t k = 0; k < out.coeffs_.size(); ++k) {
    const double factor = table_->exponents(k)[var] + 1.0;
    out.coeffs_[k] = factor * coeffs_[table_->shift(var, k)];
  }
  return out;
}

Jet Jet::truncated(int new_order) const {
  if (new_order > order()) throw OrderError("cannot raise the order of a jet by truncation");
  if (new_order == order()) return *this;
  Jet out(MultiIndexTable::get(dim(), new_order));
  std::copy_n(coeffs_.begin(), out.coeffs_.size(), out.coeffs_.begin());
  return out;
}

Jet Jet::nilpotent() const {
  Jet out = *this;
  out.coeffs_[0] = 0.0;
  return out;
}

void Jet::require_compatible(const Jet& other) const {
  if (table_ != other.table_)
    throw std::invalid_argument("jet arithmetic on mismatched dimension/order (" +
                                std::to_string(dim()) + "," + std::to_string(order()) + ") vs (" +
                                std::to_string(other.dim()) + "," +
                                std::to_string(other.order()) + ")");
}

Jet Jet::operator-() const {
  Jet out = *this;
  for (double& c : out.coeffs_) c = -c;
  return out;
}

Jet& Jet::operator+=(const Jet& other) {
  require_compatible(other);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += other.coeffs_[k];
  return *this;
}

Jet& Jet::operator-=(const Jet& other) {
  require_compatible(other);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= other.coeffs_[k];
  return *this;
}

Jet& Jet::operator*=(const Jet& other) { return *this = *this * other; }
Jet& Jet::operator/=(const Jet& other) { return *this = *this / other; }

Jet& Jet::operator+=(double s) {
  coeffs_[0] += s;
  return *this;
}

Jet& Jet::operator-=(double s) {
  coeffs_[0] -= s;
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (double& c : coeffs_) c *= s;
  return *this;
}

Jet& Jet::operator/=(double s) {
  if (s == 0.0) throw SingularPointError("division of a jet by zero");
  for (double& c : coeffs_) c /= s;
  return *this;
}

void multiply_add(Jet& acc, const Jet& a, const Jet& b) {
  if (acc.table() != a.table() || a.table() != b.table())
    throw std::invalid_argument("jet arithmetic on mismatched dimension/order");
  auto out = acc.coefficients();
  auto x = a.coefficients();
  auto y = b.coefficients();
  for (const auto& t : a.table()->products()) out[t.out] += x[t.lhs] * y[t.rhs];
}

Jet operator*(const Jet& a, const Jet& b) {
  Jet out(a.table(), 0.0);
  multiply_add(out, a, b);
  return out;
}

Jet operator/(const Jet& a, const Jet& b) {
  a.require_compatible(b);
  return a * reciprocal(b);
}

Jet operator/(double s, const Jet& a) { return reciprocal(a) * s; }

Jet reciprocal(const Jet& x) {
  const double x0 = x.value();
  if (x0 == 0.0) throw SingularPointError("division by a jet with zero constant term");
  std::vector<double> series(x.order() + 1);
  double term = 1.0 / x0;
  for (auto& c : series) {
    c = term;
    term *= -1.0 / x0;
  }
  return compose(x, series);
}

Jet pow(const Jet& x, int exponent) {
  if (exponent == 0) return Jet(x.table(), 1.0);
  if (exponent < 0) return pow(reciprocal(x), -exponent);
  Jet base = x;
  Jet result(x.table(), 1.0);
  unsigned e = static_cast<unsigned>(exponent);
  while (true) {
    if (e & 1u) result = result * base;
    e >>= 1u;
    if (e == 0) break;
    base = base * base;
  }
  return result;
}

Jet exp(const Jet& x) {
  std::vector<double> series(x.order() + 1);
  const double e0 = std::exp(x.value());
  for (std::size_t k = 0; k < series.size(); ++k) series[k] = e0 / factorial(static_cast<int>(k));
  return compose(x, series);
}

Jet log(const Jet& x) {
  const double x0 = x.value();
  if (!(x0 > 0.0)) throw DomainError("log of a jet with nonpositive constant term");
  std::vector<double> series(x.order() + 1);
  series[0] = std::log(x0);
  double inv_power = 1.0;
  for (std::size_t k = 1; k < series.size(); ++k) {
    inv_power /= x0;
    series[k] = ((k % 2 == 1) ? 1.0 : -1.0) * inv_power / static_cast<double>(k);
  }
  return compose(x, series);
}

Jet sqrt(const Jet& x) {
  const double x0 = x.value();
  if (!(x0 > 0.0)) throw DomainError("sqrt of a jet with nonpositive constant term");
  std::vector<double> series(x.order() + 1);
  double binom = 1.0;
  double scale = std::sqrt(x0);
  for (std::size_t k = 0; k < series.size(); ++k) {
    if (k > 0) {
      binom *= (0.5 - static_cast<double>(k - 1)) / static_cast<double>(k);
      scale /= x0;
    }
    series[k] = binom * scale;
  }
  return compose(x, series);
}

Jet sin(const Jet& x) {
  const double s = std::sin(x.value());
  const double c = std::cos(x.value());
  const double cycle[4] = {s, c, -s, -c};
  std::vector<double> series(x.order() + 1);
  for (std::size_t k = 0; k < series.size(); ++k)
    series[k] = cycle[k % 4] / factorial(static_cast<int>(k));
  return compose(x, series);
}

Jet cos(const Jet& x) {
  const double s = std::sin(x.value());
  const double c = std::cos(x.value());
  const double cycle[4] = {c, -s, -c, s};
  std::vector<double> series(x.order() + 1);
  for (std::size_t k = 0; k < series.size(); ++k)
    series[k] = cycle[k % 4] / factorial(static_cast<int>(k));
  return compose(x, series);
}

std::vector<Jet> seed(std::span<const double> point, int order) {
  const int dim = static_cast<int>(point.size());
  std::vector<Jet> jets;
  jets.reserve(point.size());
  for (int i = 0; i < dim; ++i) jets.push_back(Jet::variable(dim, order, i, point[i]));
  return jets;
}

}  // namespace nilkill
