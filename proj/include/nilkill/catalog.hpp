#pragma once

// Built-in metrics and vector fields with their expected classifications.
// Free functions of each metric family are pinned to concrete low-degree
// polynomials so that every expectation is non-trivially testable.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nilkill/geometry.hpp"
#include "nilkill/symmetry.hpp"

namespace nilkill::catalog {

struct ExpectedProperties {
  std::optional<bool> csi;
  std::optional<bool> vsi;
  std::optional<bool> transitive;
  std::optional<bool> abelian;
  std::optional<bool> solvable;
};

/// Start point and flow times used when probing invariant preservation.
struct FlowProbe {
  Point start;
  std::vector<double> times;
};

struct CatalogEntry {
  std::string id;
  std::string citation;
  MetricSpec metric;
  std::vector<VectorFieldSpec> fields;
  std::map<std::string, Verdict> expected;
  /// Fields whose flows are expected to preserve (true) or break (false) the invariants.
  std::map<std::string, bool> expected_ipd;
  ExpectedProperties properties;
  FlowProbe probe;

  Model model() const { return build_model(metric, fields); }
};

/// Throws NotFoundError for unknown ids.
const CatalogEntry& get(std::string_view id);

/// Every id, in catalog order.
std::vector<std::string> list();

}  // namespace nilkill::catalog
