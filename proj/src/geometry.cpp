#include "nilkill/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

#include "nilkill/error.hpp"

namespace nilkill {

namespace {

constexpr double kLocusTolerance = 1e-8;

const std::vector<Variance> kLower2{Variance::Lower, Variance::Lower};
const std::vector<Variance> kUpper1Lower2{Variance::Upper, Variance::Lower, Variance::Lower};
const std::vector<Variance> kUpper1Lower3{Variance::Upper, Variance::Lower, Variance::Lower,
                                          Variance::Lower};
const std::vector<Variance> kLower4(4, Variance::Lower);
const std::vector<Variance> kLower5(5, Variance::Lower);

std::vector<Jet> truncate_all(const std::vector<Jet>& jets, int order) {
  std::vector<Jet> out;
  out.reserve(jets.size());
  for (const auto& j : jets) out.push_back(j.truncated(order));
  return out;
}

double radical_inverse(std::uint64_t index, unsigned base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

}  // namespace

int Chart::index_of(const std::string& name) const {
  const auto it = std::find(coordinates.begin(), coordinates.end(), name);
  return it == coordinates.end() ? -1 : static_cast<int>(it - coordinates.begin());
}

void MetricSpec::set(int a, int b, const ScalarExpr& e) {
  components[{std::min(a, b), std::max(a, b)}] = e;
}

void MetricSpec::set(int a, int b, std::string_view source) { set(a, b, parse(source)); }

// --- Metric --------------------------------------------------------------------

Metric::Metric(MetricSpec spec) : spec_(std::move(spec)) {
  const auto& chart = spec_.chart;
  const int n = chart.dim();
  if (n < 2) throw std::invalid_argument("a chart needs at least two coordinates");
  std::set<std::string> unique(chart.coordinates.begin(), chart.coordinates.end());
  if (static_cast<int>(unique.size()) != n)
    throw std::invalid_argument("chart coordinate names must be unique");
  if (static_cast<int>(chart.box.size()) != n)
    throw std::invalid_argument("sampling box needs one interval per coordinate");
  for (const auto& iv : chart.box)
    if (!(iv.lo <= iv.hi)) throw std::invalid_argument("sampling interval with lo > hi");

  bound_.resize(static_cast<std::size_t>(n) * n);
  for (const auto& [key, expr] : spec_.components) {
    const auto [a, b] = key;
    if (a < 0 || b >= n || a > b)
      throw std::invalid_argument("metric component index outside the upper triangle");
    bound_[a * n + b].emplace(expr, chart.coordinates, spec_.params);
  }
  if (chart.exclude) exclude_.emplace(*chart.exclude, chart.coordinates, spec_.params);
}

bool Metric::in_box(const Point& p) const {
  if (static_cast<int>(p.size()) != dim()) return false;
  for (int i = 0; i < dim(); ++i) {
    const auto& iv = spec_.chart.box[i];
    if (!(p[i] >= iv.lo && p[i] <= iv.hi)) return false;
  }
  return true;
}

bool Metric::on_singular_locus(const Point& p) const {
  if (!exclude_) return false;
  try {
    const double f = exclude_->eval(std::span<const double>(p));
    return !std::isfinite(f) || std::abs(f) <= kLocusTolerance;
  } catch (const Error&) {
    return true;
  }
}

bool Metric::admissible(const Point& p) const {
  if (!in_box(p) || on_singular_locus(p)) return false;
  try {
    metric_at(*this, p, 0);
    return true;
  } catch (const Error&) {
    return false;
  }
}

std::vector<Jet> Metric::components(std::span<const Jet> coords) const {
  const int n = dim();
  std::vector<Jet> out(static_cast<std::size_t>(n) * n, Jet(coords.front().table(), 0.0));
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      const auto& e = bound_[a * n + b];
      if (!e) continue;
      out[a * n + b] = e->eval(coords);
      if (a != b) out[b * n + a] = out[a * n + b];
    }
  }
  return out;
}

Eigen::MatrixXd Metric::components(const Point& p) const {
  const int n = dim();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      const auto& e = bound_[a * n + b];
      if (!e) continue;
      g(a, b) = g(b, a) = e->eval(std::span<const double>(p));
    }
  }
  return g;
}

// --- MetricJets ----------------------------------------------------------------

Eigen::MatrixXd MetricJets::metric_value() const {
  Eigen::MatrixXd m(dim, dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) m(a, b) = g(a, b).value();
  return m;
}

Eigen::MatrixXd MetricJets::inverse_value() const {
  Eigen::MatrixXd m(dim, dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) m(a, b) = ginv(a, b).value();
  return m;
}

double MetricJets::frobenius_scale() const { return metric_value().norm(); }

MetricJets metric_at(const Metric& metric, const Point& p, int order) {
  const int n = metric.dim();
  if (static_cast<int>(p.size()) != n) throw std::invalid_argument("point has wrong dimension");
  const auto coords = seed(p, order);
  MetricJets out;
  out.dim = n;
  out.order = order;
  out.point = p;
  out.lower = metric.components(std::span<const Jet>(coords));

  double scale2 = 0.0;
  for (const auto& c : out.lower) {
    if (!std::isfinite(c.value())) throw SingularPointError("metric component is not finite");
    scale2 += c.value() * c.value();
  }
  const double threshold = kDegenerateThreshold * std::pow(std::sqrt(scale2), n);

  // Gauss-Jordan with partial pivoting on constant terms.
  const auto& table = coords.front().table();
  std::vector<Jet> a = out.lower;
  std::vector<Jet> inv(static_cast<std::size_t>(n) * n, Jet(table, 0.0));
  for (int i = 0; i < n; ++i) inv[i * n + i] = Jet(table, 1.0);
  Jet det(table, 1.0);
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col].value()) > std::abs(a[pivot * n + col].value())) pivot = r;
    if (a[pivot * n + col].value() == 0.0)
      throw DegenerateMetricError("metric is degenerate at the requested point");
    if (pivot != col) {
      for (int k = 0; k < n; ++k) {
        std::swap(a[pivot * n + k], a[col * n + k]);
        std::swap(inv[pivot * n + k], inv[col * n + k]);
      }
      det = -det;
    }
    det = det * a[col * n + col];
    const Jet pinv = reciprocal(a[col * n + col]);
    for (int k = 0; k < n; ++k) {
      a[col * n + k] = a[col * n + k] * pinv;
      inv[col * n + k] = inv[col * n + k] * pinv;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const Jet factor = a[r * n + col];
      for (int k = 0; k < n; ++k) {
        a[r * n + k] -= factor * a[col * n + k];
        inv[r * n + k] -= factor * inv[col * n + k];
      }
    }
  }
  if (!(std::abs(det.value()) >= threshold))
    throw DegenerateMetricError("|det g| below the degeneracy threshold");

  for (int r = 0; r < n; ++r) {
    for (int c = r + 1; c < n; ++c) {
      Jet sym = (inv[r * n + c] + inv[c * n + r]) * 0.5;
      inv[r * n + c] = sym;
      inv[c * n + r] = std::move(sym);
    }
  }
  out.upper = std::move(inv);
  out.det = std::move(det);
  return out;
}

// --- Curvature -----------------------------------------------------------------

JetTensor christoffel(const MetricJets& g) {
  if (g.order < 2) throw OrderError("Christoffel symbols need metric jets of order >= 2");
  const int n = g.dim;
  const int m = g.order - 1;
  const auto table = MultiIndexTable::get(n, m);

  // dg[(c * n + a) * n + b] = d_c g_ab
  std::vector<Jet> dg(static_cast<std::size_t>(n) * n * n, Jet(table, 0.0));
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        dg[(c * n + a) * n + b] = g.g(a, b).derivative(c);
        dg[(c * n + b) * n + a] = dg[(c * n + a) * n + b];
      }
    }
  }
  auto d = [&](int c, int a, int b) -> const Jet& { return dg[(c * n + a) * n + b]; };

  JetTensor gamma(n, kUpper1Lower2, Jet(table, 0.0), g.point);
  const auto ginv = truncate_all(g.upper, m);
  std::vector<Jet> first_kind(n, Jet(table, 0.0));
  for (int b = 0; b < n; ++b) {
    for (int c = b; c < n; ++c) {
      for (int e = 0; e < n; ++e) first_kind[e] = (d(b, e, c) + d(c, e, b) - d(e, b, c)) * 0.5;
      for (int a = 0; a < n; ++a) {
        Jet sum(table, 0.0);
        for (int e = 0; e < n; ++e) multiply_add(sum, ginv[a * n + e], first_kind[e]);
        gamma(a, b, c) = sum;
        if (b != c) gamma(a, c, b) = std::move(sum);
      }
    }
  }
  return gamma;
}

JetTensor riemann(const MetricJets& g, const JetTensor& gamma) {
  if (g.order < 2) throw OrderError("Riemann tensor needs metric jets of order >= 2");
  const int n = g.dim;
  const int m = g.order - 2;
  const auto table = MultiIndexTable::get(n, m);

  // dgamma[((e * n + a) * n + b) * n + c] = d_e Gamma^a_bc
  std::vector<Jet> dgamma(static_cast<std::size_t>(n) * n * n * n, Jet(table, 0.0));
  std::vector<Jet> gam(gamma.data().size(), Jet(table, 0.0));
  for (std::size_t k = 0; k < gamma.data().size(); ++k) {
    gam[k] = gamma.data()[k].truncated(m);
    for (int e = 0; e < n; ++e) dgamma[e * gamma.data().size() + k] = gamma.data()[k].derivative(e);
  }
  auto G = [&](int a, int b, int c) -> const Jet& { return gam[(a * n + b) * n + c]; };
  auto dG = [&](int e, int a, int b, int c) -> const Jet& {
    return dgamma[((e * n + a) * n + b) * n + c];
  };

  JetTensor r(n, kUpper1Lower3, Jet(table, 0.0), g.point);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        for (int dd = c + 1; dd < n; ++dd) {
          Jet sum = dG(c, a, dd, b) - dG(dd, a, c, b);
          Jet neg(table, 0.0);
          for (int e = 0; e < n; ++e) {
            multiply_add(sum, G(a, c, e), G(e, dd, b));
            multiply_add(neg, G(a, dd, e), G(e, c, b));
          }
          sum -= neg;
          r(a, b, dd, c) = -sum;
          r(a, b, c, dd) = std::move(sum);
        }
      }
    }
  }
  return r;
}

JetTensor riemann(const MetricJets& g) { return riemann(g, christoffel(g)); }

JetTensor lower_riemann(const MetricJets& g, const JetTensor& riemann_up) {
  const int n = g.dim;
  const auto& table = riemann_up.data().front().table();
  const auto gl = truncate_all(g.lower, table->order());
  JetTensor out(n, kLower4, Jet(table, 0.0), riemann_up.base());
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          Jet& dst = out(a, b, c, d);
          for (int e = 0; e < n; ++e) multiply_add(dst, gl[a * n + e], riemann_up(e, b, c, d));
        }
  return out;
}

JetTensor ricci(const JetTensor& riemann_up) {
  const int n = riemann_up.dim();
  const auto& table = riemann_up.data().front().table();
  JetTensor out(n, kLower2, Jet(table, 0.0), riemann_up.base());
  for (int b = 0; b < n; ++b)
    for (int d = 0; d < n; ++d)
      for (int a = 0; a < n; ++a) out(b, d) += riemann_up(a, b, a, d);
  return out;
}

Jet ricci_scalar(const MetricJets& g, const JetTensor& ric) {
  const int n = g.dim;
  const auto& table = ric.data().front().table();
  const auto ginv = truncate_all(g.upper, table->order());
  Jet sum(table, 0.0);
  for (int b = 0; b < n; ++b)
    for (int d = 0; d < n; ++d) multiply_add(sum, ginv[b * n + d], ric(b, d));
  return sum;
}

TensorValue cov_deriv_riemann(const JetTensor& gamma, const JetTensor& riemann_low) {
  const int n = riemann_low.dim();
  if (riemann_low.data().front().order() < 1)
    throw OrderError("covariant derivative of Riemann needs metric jets of order >= 3");
  const TensorValue gv = value_of(gamma);
  const TensorValue rv = value_of(riemann_low);
  TensorValue out(n, kLower5, 0.0, riemann_low.base());
  for (int e = 0; e < n; ++e)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d) {
            double v = riemann_low(a, b, c, d).d(e);
            for (int f = 0; f < n; ++f) {
              v -= gv(f, e, a) * rv(f, b, c, d) + gv(f, e, b) * rv(a, f, c, d) +
                   gv(f, e, c) * rv(a, b, f, d) + gv(f, e, d) * rv(a, b, c, f);
            }
            out(e, a, b, c, d) = v;
          }
  return out;
}

Curvature curvature_at(const Metric& metric, const Point& p, int order) {
  if (order < 2) throw OrderError("curvature needs metric jets of order >= 2");
  Curvature c;
  c.metric = metric_at(metric, p, order);
  c.gamma = christoffel(c.metric);
  c.riemann_up = riemann(c.metric, c.gamma);
  c.riemann_low = lower_riemann(c.metric, c.riemann_up);
  c.ricci = ricci(c.riemann_up);
  c.scalar = ricci_scalar(c.metric, c.ricci);
  return c;
}

// --- Invariants ----------------------------------------------------------------

std::vector<std::string> invariant_names(int jet_order) {
  std::vector<std::string> names{"R", "R_ab R^ab", "R_abcd R^abcd", "R_;a R^;a",
                                 "R_abcd;e R^abcd;e"};
  if (jet_order >= 4) names.emplace_back("R_;ab R^;ab");
  return names;
}

InvariantVector invariant_vector(const Curvature& c) {
  const int order = c.metric.order;
  if (order < 3) throw OrderError("the invariant list needs metric jets of order >= 3");
  const int n = c.metric.dim;
  const Eigen::MatrixXd ginv = c.metric.inverse_value();

  InvariantVector out;
  out.names = invariant_names(order);
  out.base = c.metric.point;
  out.values.push_back(c.scalar.value());
  out.values.push_back(full_square(value_of(c.ricci), ginv));
  out.values.push_back(full_square(value_of(c.riemann_low), ginv));

  Eigen::VectorXd grad(n);
  for (int a = 0; a < n; ++a) grad(a) = c.scalar.d(a);
  out.values.push_back(grad.dot(ginv * grad));

  out.values.push_back(full_square(cov_deriv_riemann(c.gamma, c.riemann_low), ginv));

  if (order >= 4) {
    const TensorValue gv = value_of(c.gamma);
    TensorValue hess(n, kLower2, 0.0, out.base);
    for (int a = 0; a < n; ++a) {
      const Jet da = c.scalar.derivative(a);
      for (int b = 0; b < n; ++b) {
        double v = da.d(b);
        for (int e = 0; e < n; ++e) v -= gv(e, a, b) * grad(e);
        hess(a, b) = v;
      }
    }
    out.values.push_back(full_square(hess, ginv));
  }
  return out;
}

InvariantVector invariant_vector(const Metric& metric, const Point& p, int jet_order) {
  if (jet_order < 3) throw OrderError("the invariant list needs jet order >= 3");
  return invariant_vector(curvature_at(metric, p, jet_order));
}

// --- Sampling ------------------------------------------------------------------

SampleSet sample_points(const Metric& metric, std::size_t count, std::uint64_t seed) {
  const int n = metric.dim();
  if (n > static_cast<int>(std::size(kPrimes)))
    throw std::invalid_argument("sampling supports at most 16 coordinates");
  std::mt19937_64 rng(seed);
  std::vector<double> shift(n);
  for (auto& s : shift) s = static_cast<double>(rng() >> 11) * 0x1.0p-53;

  SampleSet out;
  out.seed = seed;
  const std::size_t budget = 50 * count;
  Point p(n);
  for (std::uint64_t i = 1; out.points.size() < count && out.candidates < budget; ++i) {
    ++out.candidates;
    for (int d = 0; d < n; ++d) {
      double u = radical_inverse(i, kPrimes[d]) + shift[d];
      u -= std::floor(u);
      const auto& iv = metric.chart().box[d];
      p[d] = iv.lo + (iv.hi - iv.lo) * u;
    }
    if (metric.admissible(p)) {
      out.points.push_back(p);
    } else {
      ++out.rejected;
    }
  }
  return out;
}

}  // namespace nilkill
