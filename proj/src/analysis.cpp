#include "nilkill/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nilkill/error.hpp"

namespace nilkill {

namespace {

PropertyReport invariant_report(const Metric& metric, std::span<const Point> points, double tol,
                                int jet_order, Property property) {
  PropertyReport report;
  report.property = property;
  report.tolerance = tol;
  report.invariant_names = invariant_names(jet_order);
  for (const auto& p : points) {
    try {
      auto inv = invariant_vector(metric, p, jet_order);
      bool finite = true;
      for (double v : inv.values) finite = finite && std::isfinite(v);
      if (!finite) throw SingularPointError("non-finite invariant");
      report.points.push_back({p, std::move(inv.values), -1});
    } catch (const Error&) {
      ++report.rejected;
    }
  }
  return report;
}

// Per-invariant (min, max, max |.|) over the recorded points.
struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  double abs_max = 0.0;
};

std::vector<Range> ranges(const std::vector<PointRecord>& points, std::size_t count) {
  std::vector<Range> r(count);
  for (const auto& rec : points)
    for (std::size_t k = 0; k < count && k < rec.invariants.size(); ++k) {
      const double v = rec.invariants[k];
      r[k].lo = std::min(r[k].lo, v);
      r[k].hi = std::max(r[k].hi, v);
      r[k].abs_max = std::max(r[k].abs_max, std::abs(v));
    }
  return r;
}

bool csi_verdict(const std::vector<PointRecord>& points, std::size_t count, double tol,
                 std::vector<double>* spread) {
  if (points.empty()) return false;
  bool ok = true;
  for (const auto& r : ranges(points, count)) {
    const double s = r.hi - r.lo;
    if (spread != nullptr) spread->push_back(s);
    if (!(s <= tol * std::max(1.0, r.abs_max))) ok = false;
  }
  return ok;
}

bool vsi_verdict(const std::vector<PointRecord>& points, std::size_t count, double tol,
                 std::vector<double>* spread) {
  if (points.empty()) return false;
  bool ok = true;
  for (const auto& r : ranges(points, count)) {
    if (spread != nullptr) spread->push_back(r.abs_max);
    if (!(r.abs_max <= tol)) ok = false;
  }
  return ok;
}

bool transitive_verdict(const std::vector<PointRecord>& points, int dimension) {
  if (points.empty()) return false;
  return std::all_of(points.begin(), points.end(),
                     [&](const PointRecord& r) { return r.rank == dimension; });
}

}  // namespace

std::string_view to_string(Property p) {
  switch (p) {
    case Property::Csi: return "CSI";
    case Property::Vsi: return "VSI";
    case Property::Transitive: return "TRANSITIVE";
  }
  return "?";
}

bool PropertyReport::audit() const {
  switch (property) {
    case Property::Csi: return csi_verdict(points, invariant_names.size(), tolerance, nullptr);
    case Property::Vsi: return vsi_verdict(points, invariant_names.size(), tolerance, nullptr);
    case Property::Transitive: return transitive_verdict(points, dimension);
  }
  return false;
}

PropertyReport csi_check(const Metric& metric, std::span<const Point> points, double tol,
                         int jet_order) {
  auto report = invariant_report(metric, points, tol, jet_order, Property::Csi);
  if (report.points.size() < kMinCsiPoints)
    throw NoAdmissiblePointsError("CSI check needs at least " + std::to_string(kMinCsiPoints) +
                                  " admissible points, got " + std::to_string(report.points.size()));
  report.verdict = csi_verdict(report.points, report.invariant_names.size(), tol, &report.spread);
  return report;
}

PropertyReport vsi_check(const Metric& metric, std::span<const Point> points, double tol,
                         int jet_order) {
  auto report = invariant_report(metric, points, tol, jet_order, Property::Vsi);
  if (report.points.empty()) throw NoAdmissiblePointsError("VSI check found no admissible point");
  report.verdict = vsi_verdict(report.points, report.invariant_names.size(), tol, &report.spread);
  return report;
}

PropertyReport transitivity_check(std::span<const VectorField> fields, std::span<const Point> points,
                                  int dimension) {
  PropertyReport report;
  report.property = Property::Transitive;
  report.dimension = dimension;
  report.tolerance = kRankThreshold;
  for (const auto& p : points) {
    try {
      report.points.push_back({p, {}, span_dimension(fields, p)});
    } catch (const Error&) {
      ++report.rejected;
    }
  }
  report.verdict = transitive_verdict(report.points, dimension);
  return report;
}

}  // namespace nilkill
