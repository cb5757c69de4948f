#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nilkill/geometry.hpp"
#include "nilkill/symmetry.hpp"

namespace nilkill::cli {

inline constexpr const char* kVersion = "0.1.0";

/// A metric definition file after validation.
struct MetricDocument {
  MetricSpec metric;
  std::vector<VectorFieldSpec> fields;
  std::optional<std::uint64_t> seed;
  /// Keys: killing, nilpotency, property, closure, ipd.
  std::map<std::string, double> tolerances;
};

/// Validates the document shape and every expression. Throws SchemaError.
MetricDocument parse_metric_document(const nlohmann::json& doc);
/// Throws SchemaError for unreadable files and malformed JSON as well.
MetricDocument load_metric_document(const std::filesystem::path& path);

/// Serializes with insertion-ordered keys and doubles printed as %.17g.
std::string dump(const nlohmann::ordered_json& value, bool pretty);

/// Exit codes: 0 pass, 1 a check failed or an expectation was missed, 2 usage or input error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nilkill::cli
