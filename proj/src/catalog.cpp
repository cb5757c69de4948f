#include "nilkill/catalog.hpp"

#include <initializer_list>
#include <utility>

#include "nilkill/error.hpp"

namespace nilkill::catalog {

namespace {

constexpr Verdict kKilling = Verdict::Killing;
constexpr Verdict kProper = Verdict::NilKillingProper;
constexpr Verdict kGeneric = Verdict::Generic;

struct Component {
  int a;
  int b;
  const char* source;
};

MetricSpec make_metric(std::vector<std::string> coordinates, std::vector<Interval> box,
                       std::initializer_list<Component> components, ParamMap params = {},
                       const char* exclude = nullptr) {
  MetricSpec spec;
  spec.chart.coordinates = std::move(coordinates);
  spec.chart.box = std::move(box);
  if (exclude != nullptr) spec.chart.exclude = parse(exclude);
  spec.params = std::move(params);
  for (const auto& c : components) spec.set(c.a, c.b, c.source);
  return spec;
}

VectorFieldSpec field(std::string name, const std::vector<std::string>& components) {
  return VectorFieldSpec::parse(std::move(name), components);
}

/// The n coordinate translations, named "d" + coordinate.
std::vector<VectorFieldSpec> translations(const std::vector<std::string>& coordinates,
                                          std::initializer_list<int> which) {
  std::vector<VectorFieldSpec> out;
  const auto n = coordinates.size();
  for (int k : which) {
    std::vector<std::string> comps(n, "0");
    comps[k] = "1";
    out.push_back(field("d" + coordinates[k], comps));
  }
  return out;
}

std::vector<Interval> cube(std::size_t n, double half) { return std::vector<Interval>(n, {-half, half}); }

CatalogEntry intro_neutral() {
  CatalogEntry e;
  e.id = "intro-neutral";
  e.citation = "neutral-signature CSI metric 2du(dv+V du)+2dU(dV+b v^4 dU), b = 1";
  const std::vector<std::string> x{"u", "v", "U", "V"};
  e.metric = make_metric(x, cube(4, 2.0),
                         {{0, 0, "2*V"}, {0, 1, "1"}, {2, 2, "2*b*v^4"}, {2, 3, "1"}}, {{"b", 1.0}});
  e.fields = translations(x, {0, 1, 2, 3});
  e.expected = {{"du", kKilling}, {"dv", kProper}, {"dU", kKilling}, {"dV", kProper}};
  for (const auto& f : e.fields) e.expected_ipd[f.name] = true;
  e.properties.csi = true;
  e.properties.transitive = true;
  e.properties.abelian = true;
  e.probe = {{0.3, 0.5, 0.2, 0.1}, {-1.0, -0.5, 0.5, 1.0}};
  return e;
}

CatalogEntry vsi_eps0() {
  CatalogEntry e;
  e.id = "vsi-eps0";
  e.citation = "4D VSI Kundt metric, epsilon = 0, H1 = u, H0 = x2*u, W2 = x2";
  const std::vector<std::string> x{"u", "v", "x1", "x2"};
  e.metric = make_metric(x, cube(4, 1.0),
                         {{0, 0, "2*(v*u + x2*u)"}, {0, 1, "1"}, {0, 3, "x2"}, {2, 2, "1"}, {3, 3, "1"}});
  e.fields = translations(x, {0, 1, 2, 3});
  e.expected = {{"du", kProper}, {"dv", kProper}, {"dx1", kKilling}, {"dx2", kProper}};
  for (const auto& f : e.fields) e.expected_ipd[f.name] = true;
  e.properties = {true, true, true, true, true};
  e.probe = {{0.3, 0.2, 0.1, -0.2}, {-0.5, 0.5}};
  return e;
}

CatalogEntry vsi_eps1() {
  CatalogEntry e;
  e.id = "vsi-eps1";
  e.citation = "4D VSI Kundt metric, epsilon = 1, H1 = u, H0 = x2*u, W2 = 0";
  const std::vector<std::string> x{"u", "v", "x1", "x2"};
  e.metric = make_metric(x, {{-1.0, 1.0}, {-1.0, 1.0}, {0.1, 2.0}, {-1.0, 1.0}},
                         {{0, 0, "2*(eps*v^2/(2*x1^2) + v*u + x2*u)"},
                          {0, 1, "1"},
                          {0, 2, "-2*eps*v/x1"},
                          {2, 2, "1"},
                          {3, 3, "1"}},
                         {{"eps", 1.0}}, "x1");
  e.fields = {
      field("xi1", {"-u^2/x1", "(2*x1^4 + 2*u*v*x1^2 - u^2*v^2)/x1^3", "u*(2*x1^2 - u*v)/x1^2", "0"}),
      field("xi2", {"1/x1", "v^2/x1^3", "v/x1^2", "0"}),
      field("xi3", {"-u/x1", "v*(x1^2 - u*v)/x1^3", "(x1^2 - u*v)/x1^2", "0"}),
      field("dx2", {"0", "0", "0", "1"}),
  };
  e.expected = {{"xi1", kProper}, {"xi2", kProper}, {"xi3", kProper}, {"dx2", kProper}};
  for (const auto& f : e.fields) e.expected_ipd[f.name] = true;
  e.properties = {true, true, true, true, true};
  e.probe = {{0.3, 0.5, 1.2, -0.4}, {-0.1, 0.1}};
  return e;
}

CatalogEntry neutral_csi() {
  CatalogEntry e;
  e.id = "neutral-csi";
  e.citation =
      "neutral-signature CSI class, a = b = 1, G3 = u, G2 = U, G1 = u*U, G0 = 0, H = u*U";
  const std::vector<std::string> x{"u", "v", "U", "V"};
  e.metric = make_metric(x, cube(4, 2.0),
                         {{0, 0, "2*(a*V + u*U)"},
                          {0, 1, "1"},
                          {2, 2, "2*(b*v^4 + v^3*u + v^2*U + v*u*U)"},
                          {2, 3, "1"}},
                         {{"a", 1.0}, {"b", 1.0}});
  e.fields = translations(x, {0, 1, 2, 3});
  e.fields.push_back(field("xi5", {"-u", "v", "-2*U", "2*V"}));
  for (const auto& f : e.fields) {
    e.expected[f.name] = kProper;
    e.expected_ipd[f.name] = true;
  }
  e.properties.csi = true;
  e.properties.transitive = true;
  e.properties.abelian = false;
  e.properties.solvable = true;
  e.probe = {{0.3, 0.5, 0.2, 0.1}, {-1.0, -0.5, 0.5, 1.0}};
  return e;
}

CatalogEntry ideg_template() {
  CatalogEntry e;
  e.id = "ideg-template";
  e.citation = "I-degenerate template, k = 2, n = 6, bracket [v1^2, v1*v2]";
  const std::vector<std::string> x{"u1", "u2", "v1", "v2", "x1", "x2"};
  e.metric = make_metric(x, cube(6, 1.0),
                         {{0, 0, "2*(v1^2 + u2*x1)"},
                          {0, 1, "v1*v2 + u1"},
                          {1, 1, "2*(v1 + x2)"},
                          {0, 2, "1"},
                          {1, 3, "1"},
                          {0, 4, "v1*x2"},
                          {0, 5, "u1"},
                          {1, 4, "v2"},
                          {1, 5, "x1*u1"},
                          {4, 4, "1 + x2^2"},
                          {5, 5, "1"}});
  e.fields = translations(x, {2, 3});
  e.expected = {{"dv1", kProper}, {"dv2", kProper}};
  e.expected_ipd = {{"dv1", true}, {"dv2", true}};
  e.probe = {{0.3, -0.2, 0.1, -0.3, 0.4, 0.5}, {-0.5, 0.5}};
  return e;
}

CatalogEntry kundt() {
  CatalogEntry e;
  e.id = "kundt";
  e.citation = "4D Kundt metric, H = v^2 + u*x1, W1 = v*x2";
  const std::vector<std::string> x{"u", "v", "x1", "x2"};
  e.metric = make_metric(x, cube(4, 1.0),
                         {{0, 0, "2*(v^2 + u*x1)"}, {0, 1, "1"}, {0, 2, "v*x2"}, {2, 2, "1"}, {3, 3, "1"}});
  e.fields = {field("l", {"0", "1", "0", "0"})};
  e.expected = {{"l", kProper}};
  e.expected_ipd = {{"l", true}};
  e.probe = {{0.3, 0.1, 0.4, -0.2}, {-0.5, 0.5}};
  return e;
}

CatalogEntry minkowski4() {
  CatalogEntry e;
  e.id = "minkowski4";
  e.citation = "flat Minkowski space";
  const std::vector<std::string> x{"t", "x", "y", "z"};
  e.metric = make_metric(x, cube(4, 1.0), {{0, 0, "-1"}, {1, 1, "1"}, {2, 2, "1"}, {3, 3, "1"}});
  e.fields = translations(x, {0, 1, 2, 3});
  e.fields.push_back(field("boost_x", {"x", "t", "0", "0"}));
  e.fields.push_back(field("rot_yz", {"0", "0", "-z", "y"}));
  for (const auto& f : e.fields) {
    e.expected[f.name] = kKilling;
    e.expected_ipd[f.name] = true;
  }
  e.properties.csi = true;
  e.properties.vsi = true;
  e.properties.transitive = true;
  e.properties.abelian = false;
  e.properties.solvable = true;
  e.probe = {{0.1, 0.2, 0.3, 0.4}, {-0.5, 0.5}};
  return e;
}

CatalogEntry sphere2() {
  CatalogEntry e;
  e.id = "sphere2";
  e.citation = "unit round 2-sphere";
  const std::vector<std::string> x{"th", "ph"};
  e.metric = make_metric(x, {{0.3, 2.8}, {0.0, 6.0}}, {{0, 0, "1"}, {1, 1, "sin(th)^2"}}, {},
                         "sin(th)");
  e.fields = {
      field("dph", {"0", "1"}),
      field("rot_x", {"-sin(ph)", "-cos(ph)*cos(th)/sin(th)"}),
      field("rot_y", {"cos(ph)", "-sin(ph)*cos(th)/sin(th)"}),
  };
  for (const auto& f : e.fields) {
    e.expected[f.name] = kKilling;
    e.expected_ipd[f.name] = true;
  }
  e.properties.csi = true;
  e.properties.vsi = false;
  e.properties.transitive = true;
  e.properties.abelian = false;
  e.probe = {{1.2, 3.0}, {-0.5, 0.5}};
  return e;
}

CatalogEntry schwarzschild() {
  CatalogEntry e;
  e.id = "schwarzschild";
  e.citation = "Schwarzschild exterior, M = 1";
  const std::vector<std::string> x{"t", "r", "th", "ph"};
  e.metric = make_metric(x, {{0.0, 1.0}, {2.2, 8.0}, {0.3, 2.8}, {0.0, 6.0}},
                         {{0, 0, "-(1 - 2*M/r)"},
                          {1, 1, "1/(1 - 2*M/r)"},
                          {2, 2, "r^2"},
                          {3, 3, "r^2*sin(th)^2"}},
                         {{"M", 1.0}}, "(r - 2*M)*sin(th)");
  e.fields = translations(x, {0, 3});
  e.expected = {{"dt", kKilling}, {"dph", kKilling}};
  e.expected_ipd = {{"dt", true}, {"dph", true}};
  e.properties.csi = false;
  e.properties.vsi = false;
  e.probe = {{0.5, 4.0, 1.2, 3.0}, {-0.4, 0.4}};
  return e;
}

CatalogEntry warped_plane() {
  CatalogEntry e;
  e.id = "warped-plane";
  e.citation = "Euclidean plane warped as diag(1, 1 + u^2)";
  const std::vector<std::string> x{"u", "w"};
  e.metric = make_metric(x, cube(2, 1.0), {{0, 0, "1"}, {1, 1, "1 + u^2"}});
  e.fields = translations(x, {0, 1});
  e.expected = {{"du", kGeneric}, {"dw", kKilling}};
  e.expected_ipd = {{"du", false}, {"dw", true}};
  e.properties.csi = false;
  e.properties.vsi = false;
  e.probe = {{0.2, 0.1}, {-0.5, 0.5}};
  return e;
}

const std::vector<CatalogEntry>& entries() {
  static const std::vector<CatalogEntry> all{intro_neutral(), vsi_eps0(),   vsi_eps1(),
                                             neutral_csi(),   ideg_template(), kundt(),
                                             minkowski4(),    sphere2(),    schwarzschild(),
                                             warped_plane()};
  return all;
}

}  // namespace

const CatalogEntry& get(std::string_view id) {
  for (const auto& e : entries())
    if (e.id == id) return e;
  throw NotFoundError("no catalog entry '" + std::string(id) + "'");
}

std::vector<std::string> list() {
  std::vector<std::string> ids;
  for (const auto& e : entries()) ids.push_back(e.id);
  return ids;
}

}  // namespace nilkill::catalog
