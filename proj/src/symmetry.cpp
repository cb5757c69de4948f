#include "nilkill/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nilkill/error.hpp"

namespace nilkill {

namespace {

const std::vector<Variance> kLower2{Variance::Lower, Variance::Lower};

// Dimensions of the derived series from structure constants.
std::vector<int> derived_series(const std::vector<double>& c, int m) {
  std::vector<int> dims{m};
  Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(m, m);
  double scale = 1.0;
  for (double v : c) scale = std::max(scale, std::abs(v));
  while (basis.cols() > 0) {
    const int d = static_cast<int>(basis.cols());
    Eigen::MatrixXd brackets(m, std::max(1, d * (d - 1) / 2));
    brackets.setZero();
    int col = 0;
    for (int p = 0; p < d; ++p) {
      for (int q = p + 1; q < d; ++q, ++col) {
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j) {
            const double w = basis(i, p) * basis(j, q);
            if (w == 0.0) continue;
            for (int k = 0; k < m; ++k) brackets(k, col) += w * c[(i * m + j) * m + k];
          }
      }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(brackets, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    int rank = 0;
    for (int k = 0; k < s.size(); ++k)
      if (s(k) > 1e-6 * scale) ++rank;
    if (rank == d) break;
    basis = svd.matrixU().leftCols(rank);
    dims.push_back(rank);
  }
  return dims;
}

}  // namespace

// --- VectorField -----------------------------------------------------------------

VectorFieldSpec VectorFieldSpec::parse(std::string name,
                                       const std::vector<std::string>& components) {
  VectorFieldSpec spec{std::move(name), {}};
  for (const auto& c : components) spec.components.push_back(nilkill::parse(c));
  return spec;
}

VectorField::VectorField(VectorFieldSpec spec, const Chart& chart, const ParamMap& params)
    : spec_(std::move(spec)) {
  if (static_cast<int>(spec_.components.size()) != chart.dim())
    throw std::invalid_argument("vector field '" + spec_.name + "' needs " +
                                std::to_string(chart.dim()) + " components");
  for (const auto& e : spec_.components) bound_.emplace_back(e, chart.coordinates, params);
}

Point VectorField::at(const Point& p) const {
  Point out(bound_.size());
  for (std::size_t a = 0; a < bound_.size(); ++a) out[a] = bound_[a].eval(std::span<const double>(p));
  return out;
}

std::vector<Jet> VectorField::at(std::span<const Jet> coords) const {
  std::vector<Jet> out;
  out.reserve(bound_.size());
  for (const auto& b : bound_) out.push_back(b.eval(coords));
  return out;
}

std::vector<Jet> VectorField::jets(const Point& p, int order) const {
  const auto coords = seed(p, order);
  return at(std::span<const Jet>(coords));
}

const VectorField& Model::field(std::string_view name) const {
  for (const auto& f : fields)
    if (f.name() == name) return f;
  throw NotFoundError("no vector field named '" + std::string(name) + "'");
}

std::vector<VectorField> Model::select(std::span<const std::string> names) const {
  if (names.empty()) return fields;
  std::vector<VectorField> out;
  for (const auto& n : names) out.push_back(field(n));
  return out;
}

Model build_model(const MetricSpec& metric, const std::vector<VectorFieldSpec>& fields) {
  Model model{Metric(metric), {}};
  for (const auto& f : fields) model.fields.emplace_back(f, metric.chart, metric.params);
  return model;
}

// --- Lie derivative and operator -------------------------------------------------------

TensorValue lie_derivative_metric(const MetricJets& g, std::span<const Jet> field) {
  if (g.order < 1 || field.empty() || field.front().order() < 1)
    throw OrderError("the Lie derivative needs jets of order >= 1");
  const int n = g.dim;
  TensorValue out(n, kLower2, 0.0, g.point);
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      double v = 0.0;
      for (int c = 0; c < n; ++c) {
        v += field[c].value() * g.g(a, b).d(c);
        v += g.g(c, b).value() * field[c].d(a);
        v += g.g(a, c).value() * field[c].d(b);
      }
      out(a, b) = v;
      out(b, a) = v;
    }
  }
  return out;
}

TensorValue lie_derivative_metric(const Metric& metric, const VectorField& field,
                                  const Point& p) {
  const auto g = metric_at(metric, p, 1);
  const auto x = field.jets(p, 1);
  return lie_derivative_metric(g, x);
}

OperatorValue mixed_operator(const Eigen::MatrixXd& metric, const Eigen::MatrixXd& inverse,
                             const TensorValue& n) {
  const int dim = n.dim();
  Eigen::MatrixXd lower(dim, dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) lower(a, b) = n(a, b);
  OperatorValue op = inverse * lower;

  // g(N(Y), Z) = g_{ca} N^a_b Y^b Z^c must reproduce n(Y, Z) = n_{cb} Y^b Z^c.
  const double residual = (metric * op - lower).cwiseAbs().maxCoeff();
  const double bound =
      1e-6 * (metric.norm() * inverse.norm() * lower.norm() + 1e-300);
  if (!(residual <= bound))
    throw std::logic_error("mixed operator fails g(N(Y),Z) = n(Y,Z); inverse metric inaccurate");
  return op;
}

OperatorValue mixed_operator(const MetricJets& g, const TensorValue& n) {
  return mixed_operator(g.metric_value(), g.inverse_value(), n);
}

NilpotencyResult nilpotency_test(const OperatorValue& op, double tol) {
  if (op.rows() != op.cols()) throw std::invalid_argument("nilpotency test needs a square operator");
  NilpotencyResult r;
  r.norm = op.norm();
  const double scale = std::max(1.0, r.norm);
  r.nilpotent = true;
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(op.rows(), op.cols());
  double bound = tol;
  for (Eigen::Index k = 1; k <= op.rows(); ++k) {
    power = power * op;
    bound *= scale;
    const double residual = std::abs(power.trace());
    r.residuals.push_back(residual);
    if (!(residual <= bound)) r.nilpotent = false;
  }
  return r;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Killing: return "KILLING";
    case Verdict::NilKillingProper: return "NIL_KILLING_PROPER";
    case Verdict::Generic: return "GENERIC";
  }
  return "?";
}

std::optional<Verdict> verdict_from_string(std::string_view s) {
  for (auto v : {Verdict::Killing, Verdict::NilKillingProper, Verdict::Generic})
    if (to_string(v) == s) return v;
  return std::nullopt;
}

ClassificationReport classify_field(const Metric& metric, const VectorField& field,
                                    std::span<const Point> points, const Tolerances& tol) {
  ClassificationReport report;
  report.field = field.name();
  report.tolerances = tol;
  for (const auto& p : points) {
    PointDiagnostics diag;
    diag.point = p;
    try {
      const auto g = metric_at(metric, p, 1);
      const auto x = field.jets(p, 1);
      const auto n = lie_derivative_metric(g, x);
      diag.lie_norm = frobenius_norm(n);
      diag.metric_norm = g.frobenius_scale();
      diag.killing = diag.lie_norm <= tol.killing * diag.metric_norm;
      diag.nilpotency = nilpotency_test(mixed_operator(g, n), tol.nilpotency);
    } catch (const Error&) {
      ++report.rejected;
      continue;
    }
    report.points.push_back(std::move(diag));
  }
  if (report.points.empty())
    throw NoAdmissiblePointsError("no admissible point to classify field '" + field.name() + "'");

  const bool killing = std::all_of(report.points.begin(), report.points.end(),
                                   [](const auto& d) { return d.killing; });
  const bool nilpotent = std::all_of(report.points.begin(), report.points.end(),
                                     [](const auto& d) { return d.nilpotency.nilpotent; });
  report.verdict = killing ? Verdict::Killing
                   : nilpotent ? Verdict::NilKillingProper
                               : Verdict::Generic;
  return report;
}

// --- Brackets and algebras ---------------------------------------------------------

Point lie_bracket(const VectorField& x, const VectorField& y, const Point& p) {
  const auto coords = seed(p, 1);
  const auto xj = x.at(std::span<const Jet>(coords));
  const auto yj = y.at(std::span<const Jet>(coords));
  const int n = static_cast<int>(p.size());
  Point out(n, 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) out[a] += xj[b].value() * yj[a].d(b) - yj[b].value() * xj[a].d(b);
  return out;
}

double AlgebraReport::structure_constant(int i, int j, int k) const {
  const int m = static_cast<int>(fields.size());
  return structure_constants.at((static_cast<std::size_t>(i) * m + j) * m + k);
}

int numerical_rank(const Eigen::MatrixXd& m, double rel) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > rel * s(0)) ++rank;
  return rank;
}

int span_dimension(std::span<const VectorField> fields, const Point& p) {
  if (fields.empty()) return 0;
  const int n = static_cast<int>(p.size());
  Eigen::MatrixXd m(n, static_cast<Eigen::Index>(fields.size()));
  for (std::size_t k = 0; k < fields.size(); ++k) {
    const auto v = fields[k].at(p);
    for (int a = 0; a < n; ++a) m(a, static_cast<Eigen::Index>(k)) = v[a];
  }
  return numerical_rank(m);
}

AlgebraReport algebra_check(const Metric& metric, std::span<const VectorField> fields,
                            std::span<const Point> points, double tol,
                            const Tolerances& classification) {
  if (fields.empty()) throw std::invalid_argument("algebra_check needs at least one field");
  const int m = static_cast<int>(fields.size());
  const int n = metric.dim();
  AlgebraReport report;
  report.tolerance = tol;
  for (const auto& f : fields) report.fields.push_back(f.name());
  report.structure_constants.assign(static_cast<std::size_t>(m) * m * m, 0.0);

  // values[p] = (X_1(p), ..., X_m(p)); brackets[p][pair] = [X_i, X_j](p)
  std::vector<std::vector<Point>> values;
  std::vector<std::vector<Point>> brackets;
  for (const auto& p : points) {
    try {
      std::vector<Point> v;
      for (const auto& f : fields) v.push_back(f.at(p));
      std::vector<Point> b;
      for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) b.push_back(lie_bracket(fields[i], fields[j], p));
      values.push_back(std::move(v));
      brackets.push_back(std::move(b));
    } catch (const Error&) {
      continue;
    }
  }
  if (values.empty())
    throw NoAdmissiblePointsError("no admissible point for the algebra check");
  report.points_used = values.size();

  const auto rows = static_cast<Eigen::Index>(values.size()) * n;
  Eigen::MatrixXd a(rows, m);
  for (std::size_t p = 0; p < values.size(); ++p)
    for (int k = 0; k < m; ++k)
      for (int c = 0; c < n; ++c) a(static_cast<Eigen::Index>(p) * n + c, k) = values[p][k][c];
  report.field_scale = a.cwiseAbs().maxCoeff();
  const double threshold = tol * (report.field_scale > 0.0 ? report.field_scale : 1.0);

  double max_bracket = 0.0;
  for (const auto& b : brackets)
    for (const auto& v : b)
      for (double x : v) max_bracket = std::max(max_bracket, std::abs(x));
  report.abelian = max_bracket <= threshold;

  if (m == 1) {
    report.closure = AlgebraReport::Closure::Closed;
    report.solvable = true;
    report.derived_series = {1, 0};
  } else if (numerical_rank(a) < m) {
    report.closure = AlgebraReport::Closure::Inconclusive;
  } else {
    const auto qr = a.colPivHouseholderQr();
    int pair = 0;
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j, ++pair) {
        Eigen::VectorXd rhs(rows);
        for (std::size_t p = 0; p < brackets.size(); ++p)
          for (int c = 0; c < n; ++c) rhs(static_cast<Eigen::Index>(p) * n + c) = brackets[p][pair][c];
        const Eigen::VectorXd coeffs = qr.solve(rhs);
        report.max_residual =
            std::max(report.max_residual, (a * coeffs - rhs).cwiseAbs().maxCoeff());
        for (int k = 0; k < m; ++k) {
          report.structure_constants[(static_cast<std::size_t>(i) * m + j) * m + k] = coeffs(k);
          report.structure_constants[(static_cast<std::size_t>(j) * m + i) * m + k] = -coeffs(k);
        }
      }
    }
    report.closure = report.max_residual <= threshold ? AlgebraReport::Closure::Closed
                                                      : AlgebraReport::Closure::NotClosed;
    if (report.closed()) {
      report.derived_series = derived_series(report.structure_constants, m);
      report.solvable = report.derived_series.back() == 0;
    }
  }

  report.all_nil_killing = true;
  for (const auto& f : fields) {
    report.members.push_back(classify_field(metric, f, points, classification));
    if (report.members.back().verdict == Verdict::Generic) report.all_nil_killing = false;
  }
  return report;
}

}  // namespace nilkill
