#pragma once

// Sampling-based property certificates. A passing report means no
// counterexample was found at the recorded points, not a proof.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nilkill/geometry.hpp"
#include "nilkill/symmetry.hpp"

namespace nilkill {

inline constexpr double kPropertyTolerance = 1e-8;
inline constexpr std::size_t kMinCsiPoints = 10;

enum class Property { Csi, Vsi, Transitive };

std::string_view to_string(Property p);

struct PointRecord {
  Point point;
  /// Invariant vector (CSI, VSI); empty for transitivity.
  std::vector<double> invariants;
  /// Span dimension (transitivity); -1 otherwise.
  int rank = -1;
};

struct PropertyReport {
  std::string subject;
  Property property = Property::Csi;
  bool verdict = false;
  std::vector<std::string> invariant_names;
  std::vector<PointRecord> points;
  /// CSI: max_p I_k - min_p I_k per invariant. VSI: max_p |I_k| per invariant.
  std::vector<double> spread;
  double tolerance = kPropertyTolerance;
  /// Required span dimension (transitivity).
  int dimension = 0;
  std::size_t rejected = 0;

  /// Re-derives the verdict from `points` and `tolerance` alone.
  bool audit() const;
};

/// CSI iff max_p I_k - min_p I_k <= tol * max(1, max_p |I_k|) for every k.
/// Throws NoAdmissiblePointsError when fewer than 10 points can be evaluated.
PropertyReport csi_check(const Metric& metric, std::span<const Point> points,
                         double tol = kPropertyTolerance, int jet_order = kDefaultJetOrder);

/// VSI iff |I_k(p)| <= tol at every point. Throws NoAdmissiblePointsError.
PropertyReport vsi_check(const Metric& metric, std::span<const Point> points,
                         double tol = kPropertyTolerance, int jet_order = kDefaultJetOrder);

/// TRANSITIVE iff span_dimension equals `dimension` at every point.
PropertyReport transitivity_check(std::span<const VectorField> fields, std::span<const Point> points,
                                  int dimension);

}  // namespace nilkill
