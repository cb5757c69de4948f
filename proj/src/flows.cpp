#include "nilkill/flows.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "nilkill/error.hpp"

namespace nilkill {

namespace {

double value_of_coord(double x) { return x; }
double value_of_coord(const Jet& x) { return x.value(); }

std::vector<double> field_at(const VectorField& f, const std::vector<double>& x) { return f.at(x); }
std::vector<Jet> field_at(const VectorField& f, const std::vector<Jet>& x) {
  return f.at(std::span<const Jet>(x));
}

template <typename T>
std::vector<T> axpy(const std::vector<T>& x, double h, const std::vector<T>& k) {
  std::vector<T> out = x;
  for (std::size_t a = 0; a < x.size(); ++a) out[a] += k[a] * h;
  return out;
}

template <typename T>
std::vector<T> rk4(const VectorField& field, std::vector<T> x, double t, const FlowOptions& opts) {
  if (t == 0.0) return x;
  if (!(opts.max_step > 0.0)) throw std::invalid_argument("flow step must be positive");
  const auto steps = static_cast<long>(std::ceil(std::abs(t) / opts.max_step));
  const double h = t / static_cast<double>(steps);
  Point current(x.size());
  for (long s = 0; s < steps; ++s) {
    const double elapsed = h * static_cast<double>(s);
    try {
      const auto k1 = field_at(field, x);
      const auto k2 = field_at(field, axpy(x, h / 2, k1));
      const auto k3 = field_at(field, axpy(x, h / 2, k2));
      const auto k4 = field_at(field, axpy(x, h, k3));
      for (std::size_t a = 0; a < x.size(); ++a)
        x[a] += (k1[a] + k2[a] * 2.0 + k3[a] * 2.0 + k4[a]) * (h / 6.0);
    } catch (const Error& e) {
      for (std::size_t a = 0; a < x.size(); ++a) current[a] = value_of_coord(x[a]);
      throw OrbitEscapeError(elapsed, current, e.what());
    }
    for (std::size_t a = 0; a < x.size(); ++a) current[a] = value_of_coord(x[a]);
    bool finite = true;
    for (double c : current) finite = finite && std::isfinite(c);
    if (!finite) throw OrbitEscapeError(elapsed + h, current, "orbit diverged");
    if (opts.domain != nullptr) {
      if (!opts.domain->in_box(current))
        throw OrbitEscapeError(elapsed + h, current, "orbit left the sampling box");
      if (opts.domain->on_singular_locus(current))
        throw OrbitEscapeError(elapsed + h, current, "orbit reached the singular locus");
    }
  }
  return x;
}

}  // namespace

Point integrate_flow(const VectorField& field, const Point& p, double t, const FlowOptions& opts) {
  if (static_cast<int>(p.size()) != field.dim())
    throw std::invalid_argument("point dimension does not match the field");
  return rk4(field, p, t, opts);
}

std::vector<Jet> integrate_flow_jets(const VectorField& field, const Point& p, double t,
                                     int order, const FlowOptions& opts) {
  if (static_cast<int>(p.size()) != field.dim())
    throw std::invalid_argument("point dimension does not match the field");
  return rk4(field, seed(p, order), t, opts);
}

Eigen::MatrixXd flow_jacobian(const VectorField& field, const Point& p, double t,
                              const FlowOptions& opts) {
  const auto image = integrate_flow_jets(field, p, t, 1, opts);
  const int n = field.dim();
  Eigen::MatrixXd j(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) j(a, b) = image[a].d(b);
  return j;
}

FlowReport ipd_check(const Metric& metric, const VectorField& field, const Point& p,
                     std::span<const double> times, double tol, int jet_order) {
  if (!metric.admissible(p)) throw SingularPointError("ipd_check needs an admissible start point");
  FlowReport report;
  report.field = field.name();
  report.start = p;
  report.tolerance = tol;
  report.times.assign(times.begin(), times.end());
  report.start_invariants = invariant_vector(metric, p, jet_order);
  const FlowOptions opts{kFlowStep, &metric};
  for (double t : times) {
    try {
      const Point q = integrate_flow(field, p, t, opts);
      auto inv = invariant_vector(metric, q, jet_order);
      for (std::size_t k = 0; k < inv.values.size(); ++k) {
        const double base = report.start_invariants.values[k];
        const double dev = std::abs(inv.values[k] - base) / std::max(1.0, std::abs(base));
        report.max_deviation = std::max(report.max_deviation, dev);
      }
      report.orbit.push_back(q);
      report.invariants.push_back(std::move(inv));
    } catch (const Error& e) {
      report.truncated = true;
      report.truncated_at = t;
      report.truncation_reason = e.what();
      break;
    }
  }
  report.ipd_on_orbit = !report.truncated && report.max_deviation <= tol;
  return report;
}

CoordinateMap::CoordinateMap(std::vector<ScalarExpr> components, const Chart& chart,
                             const ParamMap& params) {
  if (static_cast<int>(components.size()) != chart.dim())
    throw std::invalid_argument("coordinate map needs one component per coordinate");
  for (const auto& c : components) bound_.emplace_back(c, chart.coordinates, params);
}

CoordinateMap::CoordinateMap(const std::vector<std::string>& components, const Chart& chart,
                             const ParamMap& params)
    : CoordinateMap(
          [&] {
            std::vector<ScalarExpr> parsed;
            for (const auto& c : components) parsed.push_back(parse(c));
            return parsed;
          }(),
          chart, params) {}

Point CoordinateMap::operator()(const Point& p) const {
  Point out(bound_.size());
  for (std::size_t a = 0; a < bound_.size(); ++a) out[a] = bound_[a].eval(std::span<const double>(p));
  return out;
}

Eigen::MatrixXd CoordinateMap::jacobian(const Point& p) const {
  const auto coords = seed(p, 1);
  const int n = dim();
  Eigen::MatrixXd j(n, n);
  for (int a = 0; a < n; ++a) {
    const Jet image = bound_[a].eval(std::span<const Jet>(coords));
    for (int b = 0; b < n; ++b) j(a, b) = image.d(b);
  }
  return j;
}

TensorValue pullback_two_tensor(const Eigen::MatrixXd& jacobian, const TensorValue& at_image,
                                const Point& p) {
  const int n = at_image.dim();
  if (at_image.rank() != 2 || jacobian.rows() != n || jacobian.cols() != n)
    throw std::invalid_argument("pullback needs a covariant 2-tensor and a square Jacobian");
  Eigen::MatrixXd t(n, n);
  for (int c = 0; c < n; ++c)
    for (int d = 0; d < n; ++d) t(c, d) = at_image(c, d);
  const Eigen::MatrixXd pulled = jacobian.transpose() * t * jacobian;
  TensorValue out(n, {Variance::Lower, Variance::Lower}, 0.0, p);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) out(a, b) = pulled(a, b);
  return out;
}

TensorValue pullback_two_tensor(const CoordinateMap& map, const TwoTensorField& tensor,
                                const Point& p) {
  return pullback_two_tensor(map.jacobian(p), tensor(map(p)), p);
}

TensorValue pullback_metric_by_flow(const Metric& metric, const VectorField& field,
                                    const Point& p, double t, const FlowOptions& opts) {
  const auto image = integrate_flow_jets(field, p, t, 1, opts);
  const int n = field.dim();
  Eigen::MatrixXd j(n, n);
  Point q(n);
  for (int a = 0; a < n; ++a) {
    q[a] = image[a].value();
    for (int b = 0; b < n; ++b) j(a, b) = image[a].d(b);
  }
  const Eigen::MatrixXd g = metric.components(q);
  TensorValue at_image(n, {Variance::Lower, Variance::Lower}, 0.0, q);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) at_image(a, b) = g(a, b);
  return pullback_two_tensor(j, at_image, p);
}

CoordinateMap boost_map(const Chart& chart, const Point& center, double t) {
  if (chart.dim() != 4 || static_cast<int>(center.size()) != 4)
    throw std::invalid_argument("the boost map acts on a 4-dimensional chart");
  static constexpr int kWeight[4] = {-1, 1, -2, 2};
  std::vector<std::string> components;
  ParamMap params{{"boost_time", t}};
  for (int a = 0; a < 4; ++a) {
    const std::string c = "boost_center_" + std::to_string(a);
    params[c] = center[a];
    components.push_back(c + " + exp(" + std::to_string(kWeight[a]) + "*boost_time)*(" +
                         chart.coordinates[a] + " - " + c + ")");
  }
  return CoordinateMap(components, chart, params);
}

}  // namespace nilkill
