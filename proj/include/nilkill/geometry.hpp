#pragma once

// Metric evaluation, Levi-Civita curvature and the fixed list of scalar
// polynomial curvature invariants. Every derivative comes from jets; nothing
// here finite-differences.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nilkill/expr.hpp"
#include "nilkill/jet.hpp"
#include "nilkill/tensor.hpp"

namespace nilkill {

inline constexpr int kDefaultJetOrder = 3;
inline constexpr double kDegenerateThreshold = 1e-10;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct Chart {
  std::vector<std::string> coordinates;
  /// One interval per coordinate.
  std::vector<Interval> box;
  /// Zero set excluded from sampling and flows.
  std::optional<ScalarExpr> exclude;

  int dim() const noexcept { return static_cast<int>(coordinates.size()); }
  int index_of(const std::string& name) const;
};

/// Lower components g_ab stored on the upper triangle (a <= b); absent entries are zero.
struct MetricSpec {
  Chart chart;
  std::map<std::pair<int, int>, ScalarExpr> components;
  ParamMap params;

  void set(int a, int b, const ScalarExpr& e);
  void set(int a, int b, std::string_view source);
};

/// A validated, bound MetricSpec.
class Metric {
 public:
  /// Throws std::invalid_argument on malformed charts and BindError on unbound identifiers.
  explicit Metric(MetricSpec spec);

  const MetricSpec& spec() const noexcept { return spec_; }
  const Chart& chart() const noexcept { return spec_.chart; }
  const ParamMap& params() const noexcept { return spec_.params; }
  int dim() const noexcept { return spec_.chart.dim(); }

  bool in_box(const Point& p) const;
  /// True when the exclusion expression vanishes (|f| <= 1e-8) or cannot be evaluated at p.
  bool on_singular_locus(const Point& p) const;
  /// In the box, off the singular locus, and the metric is finite and nondegenerate.
  bool admissible(const Point& p) const;

  /// Row-major n*n components over jet-valued coordinates.
  std::vector<Jet> components(std::span<const Jet> coords) const;
  Eigen::MatrixXd components(const Point& p) const;

 private:
  MetricSpec spec_;
  std::vector<std::optional<BoundExpr>> bound_;
  std::optional<BoundExpr> exclude_;
};

/// g_ab, g^ab and det g as jets at a point.
struct MetricJets {
  int dim = 0;
  int order = 0;
  Point point;
  std::vector<Jet> lower;  // row-major g_ab
  std::vector<Jet> upper;  // row-major g^ab
  Jet det;

  const Jet& g(int a, int b) const { return lower[a * dim + b]; }
  const Jet& ginv(int a, int b) const { return upper[a * dim + b]; }
  Eigen::MatrixXd metric_value() const;
  Eigen::MatrixXd inverse_value() const;
  double frobenius_scale() const;
};

/// Throws DegenerateMetricError when |det g(p)| < 1e-10 * ||g||_F^n, and
/// propagates SingularPointError/DomainError from component evaluation.
MetricJets metric_at(const Metric& metric, const Point& p, int order);

/// Gamma^a_{bc} as jets of order m-1. Requires m >= 2.
JetTensor christoffel(const MetricJets& g);

/// R^a_{bcd} as jets of order m-2. Requires m >= 2.
JetTensor riemann(const MetricJets& g, const JetTensor& gamma);
JetTensor riemann(const MetricJets& g);

/// R_{abcd} = g_{ae} R^e_{bcd}, at the order of `riemann_up`.
JetTensor lower_riemann(const MetricJets& g, const JetTensor& riemann_up);

/// R_{bd} = R^a_{bad}.
JetTensor ricci(const JetTensor& riemann_up);

/// R = g^{bd} R_{bd}.
Jet ricci_scalar(const MetricJets& g, const JetTensor& ricci);

/// nabla_e R_{abcd}, slot order (e, a, b, c, d). Needs R_{abcd} of order >= 1 (metric order >= 3).
TensorValue cov_deriv_riemann(const JetTensor& gamma, const JetTensor& riemann_low);

/// Every curvature object at one point, computed once.
struct Curvature {
  MetricJets metric;
  JetTensor gamma;
  JetTensor riemann_up;
  JetTensor riemann_low;
  JetTensor ricci;
  Jet scalar;
};

Curvature curvature_at(const Metric& metric, const Point& p, int order = kDefaultJetOrder);

struct InvariantVector {
  std::vector<std::string> names;
  std::vector<double> values;
  Point base;
};

/// Names of the configured invariant list for a jet order (3 -> five, 4 -> six).
std::vector<std::string> invariant_names(int jet_order = kDefaultJetOrder);

/// R, R_ab R^ab, R_abcd R^abcd, R_;a R^;a, R_abcd;e R^abcd;e and, at jet order 4,
/// R_;ab R^;ab.
InvariantVector invariant_vector(const Curvature& c);
InvariantVector invariant_vector(const Metric& metric, const Point& p,
                                 int jet_order = kDefaultJetOrder);

struct SampleSet {
  std::vector<Point> points;
  std::size_t candidates = 0;
  std::size_t rejected = 0;
  std::uint64_t seed = 0;
};

/// Admissible points from a seeded, shifted Halton sequence over the chart box.
/// Stops after 50 * count candidates even if fewer points were found.
SampleSet sample_points(const Metric& metric, std::size_t count, std::uint64_t seed);

}  // namespace nilkill
