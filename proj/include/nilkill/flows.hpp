#pragma once

// Flows of vector fields, invariant preservation along orbits, and pullbacks
// of covariant 2-tensors by explicit coordinate maps.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nilkill/geometry.hpp"
#include "nilkill/symmetry.hpp"

namespace nilkill {

inline constexpr double kFlowStep = 0.01;
inline constexpr double kIpdTolerance = 1e-7;

struct FlowOptions {
  /// Upper bound on |h|; the step count is ceil(|t| / max_step).
  double max_step = kFlowStep;
  /// When set, every RK4 step must end inside its box and off its singular locus.
  const Metric* domain = nullptr;
};

/// phi_t(p) by fixed-step classic RK4. t = 0 returns p unchanged.
/// Throws OrbitEscapeError when the orbit leaves the domain or the field cannot be evaluated.
Point integrate_flow(const VectorField& field, const Point& p, double t, const FlowOptions& opts = {});

/// The same integration carried out on jets seeded at p: component a of the result is
/// the Taylor expansion of phi_t^a around p to the given order.
std::vector<Jet> integrate_flow_jets(const VectorField& field, const Point& p, double t, int order,
                                     const FlowOptions& opts = {});

/// J^a_b = d phi_t^a / d x^b at p.
Eigen::MatrixXd flow_jacobian(const VectorField& field, const Point& p, double t,
                              const FlowOptions& opts = {});

struct FlowReport {
  std::string field;
  Point start;
  InvariantVector start_invariants;
  std::vector<double> times;
  /// One entry per time reached; shorter than `times` when truncated.
  std::vector<Point> orbit;
  std::vector<InvariantVector> invariants;
  /// max over reached times and invariants of |I_k(phi_t p) - I_k(p)| / max(1, |I_k(p)|).
  double max_deviation = 0.0;
  double tolerance = kIpdTolerance;
  bool ipd_on_orbit = false;
  bool truncated = false;
  std::optional<double> truncated_at;
  std::string truncation_reason;
};

/// Compares the invariant vector at phi_t(p) with the one at p for each time.
/// An orbit escape truncates the report and forces ipd_on_orbit = false.
FlowReport ipd_check(const Metric& metric, const VectorField& field, const Point& p,
                     std::span<const double> times, double tol = kIpdTolerance,
                     int jet_order = kDefaultJetOrder);

/// An explicit map x -> (f^1(x), ..., f^n(x)) written in the chart's coordinates.
class CoordinateMap {
 public:
  CoordinateMap(std::vector<ScalarExpr> components, const Chart& chart, const ParamMap& params);
  CoordinateMap(const std::vector<std::string>& components, const Chart& chart,
                const ParamMap& params);

  int dim() const noexcept { return static_cast<int>(bound_.size()); }
  Point operator()(const Point& p) const;
  Eigen::MatrixXd jacobian(const Point& p) const;

 private:
  std::vector<BoundExpr> bound_;
};

using TwoTensorField = std::function<TensorValue(const Point&)>;

/// (phi^* T)_ab(p) = T_cd(phi(p)) J^c_a J^d_b.
TensorValue pullback_two_tensor(const CoordinateMap& map, const TwoTensorField& tensor,
                                const Point& p);
TensorValue pullback_two_tensor(const Eigen::MatrixXd& jacobian, const TensorValue& at_image,
                                const Point& p);

/// (phi_t^* g)(p) for the flow of `field`.
TensorValue pullback_metric_by_flow(const Metric& metric, const VectorField& field,
                                    const Point& p, double t, const FlowOptions& opts = {});

/// The tilde-shifted boost (u, v, U, V) -> p + (e^-t, e^t, e^-2t, e^2t) * (x - p).
CoordinateMap boost_map(const Chart& chart, const Point& center, double t);

}  // namespace nilkill
