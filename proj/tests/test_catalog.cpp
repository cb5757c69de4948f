#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>

#include "nilkill/analysis.hpp"
#include "nilkill/catalog.hpp"
#include "nilkill/error.hpp"
#include "nilkill/symmetry.hpp"

using namespace nilkill;

TEST_CASE("list and get") {
  const auto ids = catalog::list();
  const std::set<std::string> unique(ids.begin(), ids.end());
  CHECK(unique.size() == ids.size());
  for (const char* id : {"intro-neutral", "vsi-eps0", "vsi-eps1", "neutral-csi", "ideg-template", "kundt",
                         "minkowski4", "sphere2", "schwarzschild", "warped-plane"})
    CHECK(unique.count(id) == 1);
  for (const auto& id : ids) {
    const auto& e = catalog::get(id);
    CHECK(e.id == id);
    CHECK_FALSE(e.citation.empty());
    CHECK_FALSE(e.fields.empty());
    for (const auto& [name, verdict] : e.expected) CHECK_NOTHROW(e.model().field(name));
    for (const auto& [name, ipd] : e.expected_ipd) CHECK(e.expected.count(name) == 1);
  }
  CHECK_THROWS_AS(catalog::get("nosuch"), NotFoundError);
  CHECK(&catalog::get("kundt") == &catalog::get("kundt"));
}

TEST_CASE("VSI epsilon = 0 uses the coordinate translations") {
  const auto model = catalog::get("vsi-eps0").model();
  REQUIRE(model.fields.size() == 4);
  for (int k = 0; k < 4; ++k) {
    Point expected(4, 0.0);
    expected[k] = 1.0;
    CHECK(model.fields[k].at({0.3, 0.2, 0.1, -0.2}) == expected);
  }
}

TEST_CASE("sampling boxes keep a margin from singular loci") {
  for (const auto& id : catalog::list()) {
    const auto model = catalog::get(id).model();
    const auto s = sample_points(model.metric, 100, 42);
    CHECK_MESSAGE(s.points.size() == 100, id);
  }
  const auto& eps1 = catalog::get("vsi-eps1").metric.chart;
  CHECK(eps1.box[2].lo >= 0.1);
  const auto& schw = catalog::get("schwarzschild").metric.chart;
  CHECK(schw.box[1].lo == 2.2);
  CHECK(schw.box[1].hi == 8.0);
}

TEST_CASE("every expected classification is reproduced") {
  for (const auto& id : catalog::list()) {
    const auto& entry = catalog::get(id);
    const auto model = entry.model();
    const auto points = sample_points(model.metric, 100, 42).points;
    for (const auto& [name, verdict] : entry.expected) {
      const auto report = classify_field(model.metric, model.field(name), points);
      CHECK_MESSAGE(report.verdict == verdict, id << "/" << name << " gave " << to_string(report.verdict));
    }
  }
}

TEST_CASE("every expected set-level property is reproduced") {
  for (const auto& id : catalog::list()) {
    const auto& entry = catalog::get(id);
    const auto model = entry.model();
    const auto points = sample_points(model.metric, 100, 42).points;
    const auto& props = entry.properties;
    if (props.csi) CHECK_MESSAGE(csi_check(model.metric, points).verdict == *props.csi, id);
    if (props.vsi) CHECK_MESSAGE(vsi_check(model.metric, points).verdict == *props.vsi, id);
    if (props.transitive)
      CHECK_MESSAGE(transitivity_check(model.fields, points, model.metric.dim()).verdict == *props.transitive, id);
    if (props.abelian || props.solvable) {
      const auto algebra = algebra_check(model.metric, model.fields, points);
      CHECK_MESSAGE(algebra.closed(), id);
      if (props.abelian) CHECK_MESSAGE(algebra.abelian == *props.abelian, id);
      if (props.solvable) CHECK_MESSAGE(algebra.solvable == *props.solvable, id);
    }
  }
}
