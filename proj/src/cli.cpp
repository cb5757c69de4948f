#include "nilkill/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "nilkill/analysis.hpp"
#include "nilkill/catalog.hpp"
#include "nilkill/error.hpp"
#include "nilkill/flows.hpp"

namespace nilkill::cli {

using nlohmann::json;
using nlohmann::ordered_json;

// --- JSON output -------------------------------------------------------------------

namespace {

void write_number(std::string& out, double v) {
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void write(std::string& out, const ordered_json& v, bool pretty, int depth) {
  const auto newline = [&](int d) {
    if (!pretty) return;
    out += '\n';
    out.append(static_cast<std::size_t>(d) * 2, ' ');
  };
  switch (v.type()) {
    case ordered_json::value_t::number_float:
      write_number(out, v.get<double>());
      return;
    case ordered_json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      bool first = true;
      for (const auto& item : v) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        write(out, item, pretty, depth + 1);
      }
      newline(depth);
      out += ']';
      return;
    }
    case ordered_json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (const auto& [key, item] : v.items()) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += ordered_json(key).dump();
        out += pretty ? ": " : ":";
        write(out, item, pretty, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    default:
      out += v.dump();
  }
}

}  // namespace

std::string dump(const ordered_json& value, bool pretty) {
  std::string out;
  write(out, value, pretty, 0);
  return out;
}

// --- MetricDocument --------------------------------------------------------------------

namespace {

const std::set<std::string> kToleranceKeys{"killing", "nilpotency", "property", "closure", "ipd"};

bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t");
  const auto last = s.find_last_not_of(" \t");
  return first == std::string::npos ? std::string() : s.substr(first, last - first + 1);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.contains(key)) throw SchemaError(path + "/" + key, "required member is missing");
  return obj.at(key);
}

ScalarExpr parse_expression(const json& node, const std::string& path) {
  if (!node.is_string()) throw SchemaError(path, "expected an expression string");
  try {
    return parse(node.get<std::string>());
  } catch (const ParseError& e) {
    throw SchemaError(path, e.what());
  }
}

int coordinate_index(const std::string& token, const std::vector<std::string>& coords,
                     const std::string& path) {
  const auto it = std::find(coords.begin(), coords.end(), token);
  if (it != coords.end()) return static_cast<int>(it - coords.begin());
  if (!token.empty() && token.size() <= 2 &&
      std::all_of(token.begin(), token.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    const int k = std::stoi(token);
    if (k < static_cast<int>(coords.size())) return k;
  }
  throw SchemaError(path, "'" + token + "' is neither a coordinate name nor an index below the dimension");
}

}  // namespace

MetricDocument parse_metric_document(const json& doc) {
  if (!doc.is_object()) throw SchemaError("", "document must be a JSON object");
  MetricDocument out;

  const auto& dim_node = require(doc, "dimension", "");
  if (!dim_node.is_number_integer() || dim_node.get<long long>() < 2 || dim_node.get<long long>() > 16)
    throw SchemaError("/dimension", "expected an integer between 2 and 16");
  const auto n = static_cast<std::size_t>(dim_node.get<long long>());

  const auto& coords_node = require(doc, "coordinates", "");
  if (!coords_node.is_array()) throw SchemaError("/coordinates", "expected an array of names");
  if (coords_node.size() != n)
    throw SchemaError("/coordinates", "expected " + std::to_string(n) + " coordinate names, got " +
                                          std::to_string(coords_node.size()));
  auto& chart = out.metric.chart;
  for (std::size_t k = 0; k < n; ++k) {
    const auto path = "/coordinates/" + std::to_string(k);
    const auto& c = coords_node[k];
    if (!c.is_string() || !is_identifier(c.get<std::string>()))
      throw SchemaError(path, "expected an identifier");
    const auto name = c.get<std::string>();
    if (std::find(chart.coordinates.begin(), chart.coordinates.end(), name) != chart.coordinates.end())
      throw SchemaError(path, "duplicate coordinate '" + name + "'");
    chart.coordinates.push_back(name);
  }

  if (doc.contains("parameters")) {
    const auto& params = doc.at("parameters");
    if (!params.is_object()) throw SchemaError("/parameters", "expected an object of numbers");
    for (const auto& [name, value] : params.items()) {
      if (!is_identifier(name)) throw SchemaError("/parameters/" + name, "expected an identifier");
      if (!value.is_number()) throw SchemaError("/parameters/" + name, "expected a number");
      out.metric.params[name] = value.get<double>();
    }
  }

  const auto& metric_node = require(doc, "metric", "");
  if (!metric_node.is_object() || metric_node.empty())
    throw SchemaError("/metric", "expected a non-empty object of \"a,b\": expression");
  for (const auto& [key, value] : metric_node.items()) {
    const auto path = "/metric/" + key;
    const auto comma = key.find(',');
    if (comma == std::string::npos) throw SchemaError(path, "key must have the form \"a,b\"");
    const int a = coordinate_index(trim(key.substr(0, comma)), chart.coordinates, path);
    const int b = coordinate_index(trim(key.substr(comma + 1)), chart.coordinates, path);
    if (a > b) throw SchemaError(path, "only upper-triangle components (a <= b) are allowed");
    if (out.metric.components.count({a, b}) != 0) throw SchemaError(path, "component given twice");
    out.metric.set(a, b, parse_expression(value, path));
  }

  if (doc.contains("vector_fields")) {
    const auto& fields = doc.at("vector_fields");
    if (!fields.is_array()) throw SchemaError("/vector_fields", "expected an array");
    std::set<std::string> names;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const auto path = "/vector_fields/" + std::to_string(i);
      const auto& f = fields[i];
      if (!f.is_object()) throw SchemaError(path, "expected an object");
      const auto& name = require(f, "name", path);
      if (!name.is_string() || name.get<std::string>().empty())
        throw SchemaError(path + "/name", "expected a non-empty string");
      if (!names.insert(name.get<std::string>()).second)
        throw SchemaError(path + "/name", "duplicate field name");
      const auto& comps = require(f, "components", path);
      if (!comps.is_array() || comps.size() != n)
        throw SchemaError(path + "/components", "expected " + std::to_string(n) + " expressions");
      VectorFieldSpec spec{name.get<std::string>(), {}};
      for (std::size_t k = 0; k < n; ++k)
        spec.components.push_back(parse_expression(comps[k], path + "/components/" + std::to_string(k)));
      out.fields.push_back(std::move(spec));
    }
  }

  const auto& sampling = require(doc, "sampling", "");
  if (!sampling.is_object()) throw SchemaError("/sampling", "expected an object");
  const auto& box = require(sampling, "box", "/sampling");
  if (!box.is_object()) throw SchemaError("/sampling/box", "expected an object keyed by coordinate");
  for (const auto& [key, value] : box.items())
    if (std::find(chart.coordinates.begin(), chart.coordinates.end(), key) == chart.coordinates.end())
      throw SchemaError("/sampling/box/" + key, "unknown coordinate");
  for (const auto& name : chart.coordinates) {
    const auto path = "/sampling/box/" + name;
    if (!box.contains(name)) throw SchemaError(path, "missing interval for coordinate '" + name + "'");
    const auto& iv = box.at(name);
    if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number())
      throw SchemaError(path, "expected [lo, hi]");
    const double lo = iv[0].get<double>();
    const double hi = iv[1].get<double>();
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) throw SchemaError(path, "expected finite lo <= hi");
    chart.box.push_back({lo, hi});
  }
  if (sampling.contains("exclude") && !sampling.at("exclude").is_null())
    chart.exclude = parse_expression(sampling.at("exclude"), "/sampling/exclude");

  if (doc.contains("seed")) {
    const auto& s = doc.at("seed");
    if (!s.is_number_integer() || s.get<long long>() < 0)
      throw SchemaError("/seed", "expected a non-negative integer");
    out.seed = s.get<std::uint64_t>();
  }

  if (doc.contains("tolerances")) {
    const auto& tol = doc.at("tolerances");
    if (!tol.is_object()) throw SchemaError("/tolerances", "expected an object");
    for (const auto& [key, value] : tol.items()) {
      const auto path = "/tolerances/" + key;
      if (kToleranceKeys.count(key) == 0) throw SchemaError(path, "unknown tolerance");
      if (!value.is_number() || !(value.get<double>() > 0.0))
        throw SchemaError(path, "expected a positive number");
      out.tolerances[key] = value.get<double>();
    }
  }

  // Binding catches identifiers that are neither coordinates nor parameters.
  try {
    const Metric bound(out.metric);
    for (const auto& f : out.fields) VectorField(f, chart, out.metric.params);
  } catch (const BindError& e) {
    throw SchemaError("", e.what());
  } catch (const std::invalid_argument& e) {
    throw SchemaError("", e.what());
  }
  return out;
}

MetricDocument load_metric_document(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("", "cannot read '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("malformed JSON: ") + e.what());
  }
  return parse_metric_document(doc);
}

// --- commands ----------------------------------------------------------------------------

namespace {

struct Options {
  std::string metric_path;
  std::string entry;
  std::vector<std::string> fields;
  std::size_t points = 100;
  std::uint64_t seed = 42;
  std::optional<double> tol;
  int jet_order = kDefaultJetOrder;
  bool json = true;
  bool pretty = false;
  std::vector<double> at;
  std::vector<double> times;
};

/// Everything a command needs about its subject, from a file or the catalog.
struct Subject {
  Model model;
  const catalog::CatalogEntry* entry = nullptr;
  std::map<std::string, double> tolerances;
  std::uint64_t seed = 42;
};

struct Outcome {
  ordered_json report;
  int exit_code = 0;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ordered_json to_json(const Point& p) {
  ordered_json a = ordered_json::array();
  for (double x : p) a.push_back(x);
  return a;
}

ordered_json to_json(const std::vector<double>& v, const std::vector<std::string>& names) {
  ordered_json o = ordered_json::object();
  for (std::size_t k = 0; k < v.size() && k < names.size(); ++k) o[names[k]] = v[k];
  return o;
}

Subject load_subject(const Options& opts, CLI::App* sub) {
  const bool has_metric = !opts.metric_path.empty();
  const bool has_entry = !opts.entry.empty();
  if (has_metric == has_entry) throw UsageError("exactly one of --metric or --entry is required");
  std::uint64_t seed = opts.seed;
  if (has_entry) {
    const auto& entry = catalog::get(opts.entry);
    return Subject{entry.model(), &entry, {}, seed};
  }
  auto doc = load_metric_document(opts.metric_path);
  if (doc.seed && sub->count("--seed") == 0) seed = *doc.seed;
  return Subject{build_model(doc.metric, doc.fields), nullptr, doc.tolerances, seed};
}

double tolerance(const Options& opts, const Subject& s, const std::string& key, double fallback,
                 bool primary) {
  if (primary && opts.tol) return *opts.tol;
  const auto it = s.tolerances.find(key);
  return it != s.tolerances.end() ? it->second : fallback;
}

std::vector<VectorField> selected_fields(const Options& opts, const Subject& s) {
  auto fields = s.model.select(opts.fields);
  if (fields.empty()) throw UsageError("the metric defines no vector fields");
  return fields;
}

/// --at overrides sampling with a single point.
std::vector<Point> evaluation_points(const Options& opts, const Subject& s, ordered_json& header) {
  if (!opts.at.empty()) {
    if (static_cast<int>(opts.at.size()) != s.model.metric.dim())
      throw UsageError("--at needs " + std::to_string(s.model.metric.dim()) + " coordinates");
    header["sample"] = {{"kind", "explicit"}, {"candidates", 1}, {"rejected", 0}};
    return {opts.at};
  }
  auto sample = sample_points(s.model.metric, opts.points, s.seed);
  header["sample"] = {{"kind", "shifted_halton"},
                      {"requested", opts.points},
                      {"candidates", sample.candidates},
                      {"rejected", sample.rejected}};
  return sample.points;
}

ordered_json header(const std::string& command, const Options& opts, const Subject* s) {
  ordered_json r;
  r["version"] = kVersion;
  r["command"] = command;
  ordered_json inputs;
  if (!opts.entry.empty()) inputs["entry"] = opts.entry;
  if (!opts.metric_path.empty()) inputs["metric"] = opts.metric_path;
  inputs["fields"] = opts.fields;
  inputs["points"] = opts.points;
  inputs["jet_order"] = opts.jet_order;
  if (!opts.at.empty()) inputs["at"] = to_json(opts.at);
  if (!opts.times.empty()) inputs["times"] = to_json(opts.times);
  r["inputs"] = inputs;
  r["tolerances"] = ordered_json::object();
  r["seed"] = s != nullptr ? s->seed : opts.seed;
  r["point_count"] = 0;
  r["verdict"] = nullptr;
  r["diagnostics"] = ordered_json::array();
  return r;
}

ordered_json classification_json(const ClassificationReport& r) {
  ordered_json d;
  d["field"] = r.field;
  d["verdict"] = std::string(to_string(r.verdict));
  d["rejected"] = r.rejected;
  ordered_json pts = ordered_json::array();
  for (const auto& p : r.points) {
    ordered_json e;
    e["point"] = to_json(p.point);
    e["lie_norm"] = p.lie_norm;
    e["metric_norm"] = p.metric_norm;
    e["killing"] = p.killing;
    e["operator_norm"] = p.nilpotency.norm;
    e["trace_residuals"] = to_json(p.nilpotency.residuals);
    e["nilpotent"] = p.nilpotency.nilpotent;
    pts.push_back(std::move(e));
  }
  d["points"] = std::move(pts);
  return d;
}

ordered_json property_json(const PropertyReport& r) {
  ordered_json d = ordered_json::array();
  for (const auto& p : r.points) {
    ordered_json e;
    e["point"] = to_json(p.point);
    if (r.property == Property::Transitive)
      e["rank"] = p.rank;
    else
      e["invariants"] = to_json(p.invariants, r.invariant_names);
    d.push_back(std::move(e));
  }
  return d;
}

Outcome cmd_catalog(const Options& opts) {
  Outcome o{header("catalog", opts, nullptr), 0};
  for (const auto& id : catalog::list()) {
    const auto& e = catalog::get(id);
    ordered_json d;
    d["id"] = e.id;
    d["citation"] = e.citation;
    d["dimension"] = e.metric.chart.dim();
    d["coordinates"] = e.metric.chart.coordinates;
    ordered_json fields = ordered_json::array();
    for (const auto& f : e.fields) {
      ordered_json fj;
      fj["name"] = f.name;
      std::vector<std::string> comps;
      for (const auto& c : f.components) comps.push_back(print(c));
      fj["components"] = comps;
      const auto it = e.expected.find(f.name);
      if (it != e.expected.end()) fj["expected"] = std::string(to_string(it->second));
      fields.push_back(std::move(fj));
    }
    d["fields"] = std::move(fields);
    ordered_json props = ordered_json::object();
    const auto put = [&](const char* k, const std::optional<bool>& v) {
      if (v) props[k] = *v;
    };
    put("csi", e.properties.csi);
    put("vsi", e.properties.vsi);
    put("transitive", e.properties.transitive);
    put("abelian", e.properties.abelian);
    put("solvable", e.properties.solvable);
    d["expected_properties"] = std::move(props);
    o.report["diagnostics"].push_back(std::move(d));
  }
  o.report["verdict"] = "listed";
  return o;
}

Outcome cmd_classify(const Options& opts, CLI::App* sub) {
  const auto s = load_subject(opts, sub);
  Outcome o{header("classify", opts, &s), 0};
  Tolerances tol;
  tol.killing = tolerance(opts, s, "killing", kKillingTolerance, false);
  tol.nilpotency = tolerance(opts, s, "nilpotency", kNilpotencyTolerance, true);
  o.report["tolerances"] = {{"killing", tol.killing}, {"nilpotency", tol.nilpotency}};
  const auto points = evaluation_points(opts, s, o.report);
  const auto fields = selected_fields(opts, s);
  ordered_json verdicts = ordered_json::object();
  bool as_expected = true;
  std::size_t used = 0;
  for (const auto& f : fields) {
    const auto r = classify_field(s.model.metric, f, points, tol);
    used = std::max(used, r.points.size());
    auto d = classification_json(r);
    if (s.entry != nullptr) {
      const auto it = s.entry->expected.find(f.name());
      if (it != s.entry->expected.end()) {
        d["expected"] = std::string(to_string(it->second));
        d["as_expected"] = it->second == r.verdict;
        as_expected = as_expected && it->second == r.verdict;
      }
    }
    verdicts[f.name()] = std::string(to_string(r.verdict));
    o.report["diagnostics"].push_back(std::move(d));
  }
  o.report["point_count"] = used;
  o.report["verdict"] = fields.size() == 1 ? verdicts.begin().value() : verdicts;
  o.report["as_expected"] = as_expected;
  o.exit_code = as_expected ? 0 : 1;
  return o;
}

Outcome cmd_invariants(const Options& opts, CLI::App* sub) {
  const auto s = load_subject(opts, sub);
  Outcome o{header("invariants", opts, &s), 0};
  o.report["tolerances"] = {{"degenerate_metric", kDegenerateThreshold}};
  const auto points = evaluation_points(opts, s, o.report);
  const auto names = invariant_names(opts.jet_order);
  o.report["invariant_names"] = names;
  std::size_t used = 0;
  for (const auto& p : points) {
    ordered_json e;
    e["point"] = to_json(p);
    try {
      const auto inv = invariant_vector(s.model.metric, p, opts.jet_order);
      e["invariants"] = to_json(inv.values, names);
      ++used;
    } catch (const Error& ex) {
      e["error"] = ex.what();
    }
    o.report["diagnostics"].push_back(std::move(e));
  }
  if (used == 0) throw NoAdmissiblePointsError("no point admitted an invariant evaluation");
  o.report["point_count"] = used;
  o.report["verdict"] = "computed";
  return o;
}

Outcome cmd_property(const Options& opts, CLI::App* sub, Property property) {
  const auto s = load_subject(opts, sub);
  const std::string command = property == Property::Csi ? "check-csi" : "check-vsi";
  Outcome o{header(command, opts, &s), 0};
  const double tol = tolerance(opts, s, "property", kPropertyTolerance, true);
  o.report["tolerances"] = {{"property", tol}};
  const auto points = evaluation_points(opts, s, o.report);
  const auto r = property == Property::Csi ? csi_check(s.model.metric, points, tol, opts.jet_order)
                                           : vsi_check(s.model.metric, points, tol, opts.jet_order);
  o.report["point_count"] = r.points.size();
  o.report["verdict"] = r.verdict;
  o.report["property"] = std::string(to_string(r.property));
  o.report["semantics"] = "no counterexample found at the recorded points";
  o.report["invariant_names"] = r.invariant_names;
  o.report[property == Property::Csi ? "spread" : "max_abs"] = to_json(r.spread, r.invariant_names);
  o.report["rejected"] = r.rejected;
  o.report["audit"] = r.audit();
  o.report["diagnostics"] = property_json(r);
  o.exit_code = r.verdict ? 0 : 1;
  return o;
}

Outcome cmd_algebra(const Options& opts, CLI::App* sub) {
  const auto s = load_subject(opts, sub);
  Outcome o{header("algebra", opts, &s), 0};
  const double tol = tolerance(opts, s, "closure", kClosureTolerance, true);
  Tolerances cls;
  cls.killing = tolerance(opts, s, "killing", kKillingTolerance, false);
  cls.nilpotency = tolerance(opts, s, "nilpotency", kNilpotencyTolerance, false);
  o.report["tolerances"] = {{"closure", tol}, {"killing", cls.killing}, {"nilpotency", cls.nilpotency}};
  const auto points = evaluation_points(opts, s, o.report);
  const auto fields = selected_fields(opts, s);
  const auto r = algebra_check(s.model.metric, fields, points, tol, cls);
  const int m = static_cast<int>(r.fields.size());
  static constexpr const char* kClosure[] = {"CLOSED", "NOT_CLOSED", "INCONCLUSIVE"};
  o.report["point_count"] = r.points_used;
  o.report["verdict"] = r.closed() && r.all_nil_killing;
  o.report["closure"] = kClosure[static_cast<int>(r.closure)];
  o.report["max_residual"] = r.max_residual;
  o.report["field_scale"] = r.field_scale;
  o.report["abelian"] = r.abelian;
  o.report["solvable"] = r.solvable;
  o.report["derived_series"] = r.derived_series;
  o.report["all_nil_killing"] = r.all_nil_killing;
  ordered_json brackets = ordered_json::array();
  if (r.closed()) {
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) {
        ordered_json b;
        b["lhs"] = r.fields[i];
        b["rhs"] = r.fields[j];
        ordered_json coeffs = ordered_json::object();
        for (int k = 0; k < m; ++k) coeffs[r.fields[k]] = r.structure_constant(i, j, k);
        b["coefficients"] = std::move(coeffs);
        brackets.push_back(std::move(b));
      }
  }
  o.report["structure_constants"] = std::move(brackets);
  for (const auto& member : r.members) {
    ordered_json d;
    d["field"] = member.field;
    d["verdict"] = std::string(to_string(member.verdict));
    d["rejected"] = member.rejected;
    o.report["diagnostics"].push_back(std::move(d));
  }
  o.exit_code = r.closed() && r.all_nil_killing ? 0 : 1;
  return o;
}

Outcome cmd_span(const Options& opts, CLI::App* sub) {
  const auto s = load_subject(opts, sub);
  Outcome o{header("span", opts, &s), 0};
  o.report["tolerances"] = {{"rank", kRankThreshold}};
  const auto points = evaluation_points(opts, s, o.report);
  const auto fields = selected_fields(opts, s);
  const auto r = transitivity_check(fields, points, s.model.metric.dim());
  o.report["point_count"] = r.points.size();
  o.report["verdict"] = r.verdict;
  o.report["property"] = "TRANSITIVE";
  o.report["dimension"] = r.dimension;
  o.report["rejected"] = r.rejected;
  o.report["audit"] = r.audit();
  o.report["diagnostics"] = property_json(r);
  o.exit_code = r.verdict ? 0 : 1;
  return o;
}

Outcome cmd_flow_check(const Options& opts, CLI::App* sub) {
  const auto s = load_subject(opts, sub);
  Outcome o{header("flow-check", opts, &s), 0};
  const double tol = tolerance(opts, s, "ipd", kIpdTolerance, true);
  o.report["tolerances"] = {{"ipd", tol}, {"flow_step", kFlowStep}};

  Point start;
  std::vector<double> times = opts.times;
  if (!opts.at.empty()) {
    if (static_cast<int>(opts.at.size()) != s.model.metric.dim())
      throw UsageError("--at needs " + std::to_string(s.model.metric.dim()) + " coordinates");
    start = opts.at;
  } else if (s.entry != nullptr && !s.entry->probe.start.empty()) {
    start = s.entry->probe.start;
  } else {
    const auto sample = sample_points(s.model.metric, 1, s.seed);
    if (sample.points.empty()) throw NoAdmissiblePointsError("no admissible start point");
    start = sample.points.front();
  }
  if (times.empty() && s.entry != nullptr) times = s.entry->probe.times;
  if (times.empty()) times = {-0.5, 0.5};
  o.report["start"] = to_json(start);
  o.report["times"] = to_json(times);

  const auto fields = selected_fields(opts, s);
  ordered_json verdicts = ordered_json::object();
  bool as_expected = true;
  for (const auto& f : fields) {
    const auto r = ipd_check(s.model.metric, f, start, times, tol, opts.jet_order);
    ordered_json d;
    d["field"] = r.field;
    d["ipd_on_orbit"] = r.ipd_on_orbit;
    d["max_deviation"] = r.max_deviation;
    d["truncated"] = r.truncated;
    if (r.truncated) {
      d["truncated_at"] = *r.truncated_at;
      d["truncation_reason"] = r.truncation_reason;
    }
    ordered_json orbit = ordered_json::array();
    for (std::size_t k = 0; k < r.orbit.size(); ++k) {
      ordered_json step;
      step["time"] = r.times[k];
      step["point"] = to_json(r.orbit[k]);
      step["invariants"] = to_json(r.invariants[k].values, r.invariants[k].names);
      orbit.push_back(std::move(step));
    }
    d["orbit"] = std::move(orbit);
    bool expected = true;
    if (s.entry != nullptr) {
      const auto it = s.entry->expected_ipd.find(f.name());
      if (it != s.entry->expected_ipd.end()) {
        expected = it->second;
        d["expected"] = expected;
      }
    }
    as_expected = as_expected && expected == r.ipd_on_orbit;
    verdicts[f.name()] = r.ipd_on_orbit;
    o.report["diagnostics"].push_back(std::move(d));
  }
  o.report["point_count"] = 1;
  o.report["verdict"] = fields.size() == 1 ? verdicts.begin().value() : verdicts;
  o.report["as_expected"] = as_expected;
  o.exit_code = as_expected ? 0 : 1;
  return o;
}

Outcome cmd_validate(const Options& opts) {
  if (opts.metric_path.empty()) throw UsageError("validate needs --metric");
  const auto doc = load_metric_document(opts.metric_path);
  Outcome o{header("validate", opts, nullptr), 0};
  if (doc.seed) o.report["seed"] = *doc.seed;
  ordered_json tol = ordered_json::object();
  for (const auto& [k, v] : doc.tolerances) tol[k] = v;
  o.report["tolerances"] = std::move(tol);
  o.report["verdict"] = "valid";
  ordered_json d;
  d["dimension"] = doc.metric.chart.dim();
  d["coordinates"] = doc.metric.chart.coordinates;
  std::vector<std::string> names;
  for (const auto& f : doc.fields) names.push_back(f.name);
  d["vector_fields"] = names;
  o.report["diagnostics"].push_back(std::move(d));
  return o;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Killing and Nil-Killing vector field analysis", "nilkill"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", kVersion);
  Options opts;

  const auto add_output = [&](CLI::App* sub) {
    sub->add_flag("--json", opts.json, "Compact JSON output (default)");
    sub->add_flag("--pretty", opts.pretty, "Indented JSON output");
  };
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--metric", opts.metric_path, "Metric definition JSON file");
    sub->add_option("--entry", opts.entry, "Catalog entry id");
    sub->add_option("--field", opts.fields, "Vector field name (repeatable)");
    sub->add_option("--points", opts.points, "Number of sample points")->check(CLI::Range(1, 100000));
    sub->add_option("--seed", opts.seed, "Sampling seed");
    sub->add_option("--tol", opts.tol, "Primary tolerance of the check")->check(CLI::PositiveNumber);
    sub->add_option("--jet-order", opts.jet_order, "Jet order for invariants")->check(CLI::IsMember({3, 4}));
    sub->add_option("--at", opts.at, "Evaluate at this point instead of sampling")->delimiter(',');
    add_output(sub);
  };

  auto* catalog_cmd = app.add_subcommand("catalog", "List the built-in catalog");
  add_output(catalog_cmd);
  auto* classify = app.add_subcommand("classify", "Classify fields as Killing, Nil-Killing or generic");
  auto* invariants = app.add_subcommand("invariants", "Evaluate the curvature invariant vector");
  auto* csi = app.add_subcommand("check-csi", "Check that every invariant is constant");
  auto* vsi = app.add_subcommand("check-vsi", "Check that every invariant vanishes");
  auto* algebra = app.add_subcommand("algebra", "Fit structure constants and test closure");
  auto* span = app.add_subcommand("span", "Check that the fields span the tangent space");
  auto* flow = app.add_subcommand("flow-check", "Check invariant preservation along flows");
  for (auto* sub : {classify, invariants, csi, vsi, algebra, span, flow}) add_common(sub);
  flow->add_option("--times", opts.times, "Flow times")->delimiter(',');
  auto* validate = app.add_subcommand("validate", "Validate a metric definition file");
  validate->add_option("--metric", opts.metric_path, "Metric definition JSON file")->required();
  add_output(validate);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    Outcome o;
    if (*catalog_cmd) o = cmd_catalog(opts);
    else if (*classify) o = cmd_classify(opts, classify);
    else if (*invariants) o = cmd_invariants(opts, invariants);
    else if (*csi) o = cmd_property(opts, csi, Property::Csi);
    else if (*vsi) o = cmd_property(opts, vsi, Property::Vsi);
    else if (*algebra) o = cmd_algebra(opts, algebra);
    else if (*span) o = cmd_span(opts, span);
    else if (*flow) o = cmd_flow_check(opts, flow);
    else o = cmd_validate(opts);
    out << dump(o.report, opts.pretty) << '\n';
    return o.exit_code;
  } catch (const SchemaError& e) {
    err << "schema error at " << e.what() << '\n';
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
  } catch (const Error& e) {
    err << "input error: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    err << "input error: " << e.what() << '\n';
  }
  return 2;
}

}  // namespace nilkill::cli
