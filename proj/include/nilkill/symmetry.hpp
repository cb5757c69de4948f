#pragma once

// Lie derivatives of the metric and the Killing / Nil-Killing classifier.
//
// A field X is Nil-Killing when the operator N = g^{-1}(L_X g) is nilpotent.
// Nilpotency is decided from the traces tr N^k, k = 1..n, which all vanish
// exactly when every eigenvalue does (Newton's identities).

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "nilkill/expr.hpp"
#include "nilkill/geometry.hpp"
#include "nilkill/tensor.hpp"

namespace nilkill {

inline constexpr double kKillingTolerance = 1e-9;
inline constexpr double kNilpotencyTolerance = 1e-8;
inline constexpr double kClosureTolerance = 1e-8;
inline constexpr double kRankThreshold = 1e-8;

struct VectorFieldSpec {
  std::string name;
  std::vector<ScalarExpr> components;

  static VectorFieldSpec parse(std::string name, const std::vector<std::string>& components);
};

class VectorField {
 public:
  /// Throws std::invalid_argument on a component count mismatch and BindError on unbound names.
  VectorField(VectorFieldSpec spec, const Chart& chart, const ParamMap& params);

  const std::string& name() const noexcept { return spec_.name; }
  const VectorFieldSpec& spec() const noexcept { return spec_; }
  int dim() const noexcept { return static_cast<int>(bound_.size()); }

  Point at(const Point& p) const;
  std::vector<Jet> at(std::span<const Jet> coords) const;
  std::vector<Jet> jets(const Point& p, int order) const;

 private:
  VectorFieldSpec spec_;
  std::vector<BoundExpr> bound_;
};

/// A metric together with the vector fields defined on its chart.
struct Model {
  Metric metric;
  std::vector<VectorField> fields;

  /// Throws NotFoundError.
  const VectorField& field(std::string_view name) const;
  /// The named fields in the given order; every field when `names` is empty.
  std::vector<VectorField> select(std::span<const std::string> names) const;
};

Model build_model(const MetricSpec& metric, const std::vector<VectorFieldSpec>& fields);

/// (L_X g)_ab = X^c d_c g_ab + g_cb d_a X^c + g_ac d_b X^c.
TensorValue lie_derivative_metric(const MetricJets& g, std::span<const Jet> field);
TensorValue lie_derivative_metric(const Metric& metric, const VectorField& field, const Point& p);

using OperatorValue = Eigen::MatrixXd;

/// N^a_b = g^{ac} n_cb. Verifies g(N(Y), Z) = n(Y, Z) on the coordinate basis.
OperatorValue mixed_operator(const Eigen::MatrixXd& metric, const Eigen::MatrixXd& inverse,
                             const TensorValue& n);
OperatorValue mixed_operator(const MetricJets& g, const TensorValue& n);

struct NilpotencyResult {
  bool nilpotent = false;
  /// |tr N^k| for k = 1..n.
  std::vector<double> residuals;
  double norm = 0.0;
};

/// Nilpotent iff |tr N^k| <= tol * max(1, ||N||_F)^k for every k = 1..n.
NilpotencyResult nilpotency_test(const OperatorValue& op, double tol = kNilpotencyTolerance);

enum class Verdict { Killing, NilKillingProper, Generic };

std::string_view to_string(Verdict v);
std::optional<Verdict> verdict_from_string(std::string_view s);

struct Tolerances {
  double killing = kKillingTolerance;
  double nilpotency = kNilpotencyTolerance;
};

struct PointDiagnostics {
  Point point;
  double lie_norm = 0.0;
  double metric_norm = 0.0;
  bool killing = false;
  NilpotencyResult nilpotency;
};

struct ClassificationReport {
  std::string field;
  Verdict verdict = Verdict::Generic;
  std::vector<PointDiagnostics> points;
  /// Supplied points at which the metric or field could not be evaluated.
  std::size_t rejected = 0;
  Tolerances tolerances;
};

/// KILLING if ||L_X g||_F <= tol_K ||g||_F at every point; else NIL_KILLING_PROPER if
/// N is nilpotent at every point; else GENERIC. Throws NoAdmissiblePointsError.
ClassificationReport classify_field(const Metric& metric, const VectorField& field,
                                    std::span<const Point> points, const Tolerances& tol = {});

/// [X, Y]^a = X^b d_b Y^a - Y^b d_b X^a.
Point lie_bracket(const VectorField& x, const VectorField& y, const Point& p);

struct AlgebraReport {
  enum class Closure { Closed, NotClosed, Inconclusive };

  std::vector<std::string> fields;
  Closure closure = Closure::Inconclusive;
  /// C^k_ij stored at [(i * m + j) * m + k], with [X_i, X_j] = C^k_ij X_k.
  std::vector<double> structure_constants;
  double max_residual = 0.0;
  double field_scale = 0.0;
  double tolerance = kClosureTolerance;
  bool abelian = false;
  bool solvable = false;
  /// Dimensions of the derived series g, [g,g], [[g,g],[g,g]], ...
  std::vector<int> derived_series;
  bool all_nil_killing = false;
  std::vector<ClassificationReport> members;
  std::size_t points_used = 0;

  bool closed() const noexcept { return closure == Closure::Closed; }
  double structure_constant(int i, int j, int k) const;
};

/// Least-squares structure constants over the sample points; closed iff the worst
/// componentwise residual is <= tol * field scale. Also classifies every member.
AlgebraReport algebra_check(const Metric& metric, std::span<const VectorField> fields,
                            std::span<const Point> points, double tol = kClosureTolerance,
                            const Tolerances& classification = {});

/// Rank via singular values, counting those above rel * largest.
int numerical_rank(const Eigen::MatrixXd& m, double rel = kRankThreshold);

/// dim span{X_i(p)}.
int span_dimension(std::span<const VectorField> fields, const Point& p);

}  // namespace nilkill
