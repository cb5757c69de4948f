#include <doctest.h>

#include <cmath>
#include <vector>

#include "nilkill/catalog.hpp"
#include "nilkill/error.hpp"
#include "nilkill/flows.hpp"
#include "support.hpp"

using namespace nilkill;

namespace {

void check_points(const Point& a, const Point& b, double tol) {
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) CHECK_MESSAGE(std::abs(a[k] - b[k]) <= tol, k << ": " << a[k] << " vs " << b[k]);
}

Chart plane_chart() {
  Chart c;
  c.coordinates = {"x", "y"};
  c.box = {{-1, 1}, {-1, 1}};
  return c;
}

CoordinateMap map_of(const std::vector<std::string>& components, const Chart& chart) {
  return CoordinateMap(components, chart, {});
}

/// A point 40% of the way into the sampling box along every axis.
Point inner_point(const Metric& m) {
  Point p;
  for (const auto& iv : m.chart().box) p.push_back(iv.lo + 0.4 * (iv.hi - iv.lo));
  return p;
}

}  // namespace

TEST_CASE("flow examples") {
  const auto neutral = catalog::get("neutral-csi").model();
  check_points(integrate_flow(neutral.field("dv"), {0, 0, 0, 0}, 1.0), {0, 1, 0, 0}, 1e-14);
  // Step 0.01 carries the RK4 error z^5/120 per step with z = 2h on the V component: 7.1e-9 here.
  const auto coarse = integrate_flow(neutral.field("xi5"), {1, 1, 1, 1}, std::log(2.0));
  check_points(coarse, {0.5, 2, 0.25, 4}, 7.2e-9);
  CHECK(std::abs(coarse[3] - 4.0) > 6.9e-9);
  FlowOptions fine;
  fine.max_step = 0.005;
  check_points(integrate_flow(neutral.field("xi5"), {1, 1, 1, 1}, std::log(2.0), fine), {0.5, 2, 0.25, 4}, 1e-9);
  const Point p{0.3, -0.7, 0.2, 0.9};
  CHECK(integrate_flow(neutral.field("xi5"), p, 0.0) == p);
  check_points(integrate_flow(neutral.field("xi5"), {1, 1, 1, 1}, -std::log(2.0)), {2, 0.5, 4, 0.25}, 2e-8);
}

TEST_CASE("group law") {
  struct Case {
    const char* entry;
    const char* field;
    double s;
    double t;
  };
  for (const auto& c : {Case{"neutral-csi", "xi5", 0.7, -0.4}, Case{"neutral-csi", "xi5", -1.0, 1.0},
                        Case{"vsi-eps1", "xi3", 0.1, 0.2}, Case{"vsi-eps1", "xi1", -0.05, 0.1},
                        Case{"sphere2", "rot_x", 0.9, 0.6}, Case{"minkowski4", "boost_x", 1.0, -0.3}}) {
    const auto& entry = catalog::get(c.entry);
    const auto model = entry.model();
    const auto start = entry.probe.start.empty() ? inner_point(model.metric) : entry.probe.start;
    const auto& field = model.field(c.field);
    const auto composed = integrate_flow(field, integrate_flow(field, start, c.t), c.s);
    check_points(composed, integrate_flow(field, start, c.s + c.t), 1e-8);
  }
}

TEST_CASE("commuting fields have commuting flows") {
  struct Case {
    const char* entry;
    const char* x;
    const char* y;
    double t;
  };
  for (const auto& c : {Case{"neutral-csi", "du", "dV", 0.8}, Case{"vsi-eps1", "xi1", "xi2", 0.1},
                        Case{"vsi-eps1", "xi2", "xi3", 0.1}, Case{"vsi-eps1", "xi3", "dx2", 0.2},
                        Case{"sphere2", "dph", "dph", 0.5}}) {
    const auto& entry = catalog::get(c.entry);
    const auto model = entry.model();
    const auto start = entry.probe.start.empty() ? inner_point(model.metric) : entry.probe.start;
    const auto& x = model.field(c.x);
    const auto& y = model.field(c.y);
    check_points(integrate_flow(x, integrate_flow(y, start, c.t), c.t),
                 integrate_flow(y, integrate_flow(x, start, c.t), c.t), 1e-7);
  }
}

TEST_CASE("orbits that leave the domain raise") {
  const auto model = catalog::get("warped-plane").model();
  FlowOptions opts;
  opts.domain = &model.metric;
  CHECK_THROWS_AS(integrate_flow(model.field("du"), {0.5, 0.0}, 1.0, opts), OrbitEscapeError);
  CHECK_NOTHROW(integrate_flow(model.field("du"), {0.5, 0.0}, 1.0));
  CHECK_NOTHROW(integrate_flow(model.field("du"), {0.5, 0.0}, 0.4, opts));
  const auto eps1 = catalog::get("vsi-eps1").model();
  // xi2 = (1/x1, ...) cannot be evaluated on x1 = 0.
  CHECK_THROWS_AS(integrate_flow(eps1.field("xi2"), {0.3, 0.5, 0.0, 0.1}, 0.1), OrbitEscapeError);
}

TEST_CASE("jet flows and Jacobians") {
  const auto neutral = catalog::get("neutral-csi").model();
  const auto& xi5 = neutral.field("xi5");
  const Point p{0.3, -0.7, 0.2, 0.9};
  const double t = 0.6;
  const double weights[] = {-1, 1, -2, 2};
  const auto jets = integrate_flow_jets(xi5, p, t, 2);
  const auto end = integrate_flow(xi5, p, t);
  const auto jac = flow_jacobian(xi5, p, t);
  for (int a = 0; a < 4; ++a) {
    CHECK(jets[a].value() == end[a]);
    for (int b = 0; b < 4; ++b) {
      const double expected = a == b ? std::exp(weights[a] * t) : 0.0;
      CHECK(jets[a].d(b) == doctest::Approx(expected).epsilon(1e-8));
      CHECK(jac(a, b) == doctest::Approx(expected).epsilon(1e-8));
      for (int c = 0; c < 4; ++c) {
        std::vector<int> mi(4, 0);
        ++mi[b];
        ++mi[c];
        CHECK(std::abs(jets[a].partial(mi)) < 1e-12);
      }
    }
  }
  // Nonlinear field: Jacobian against central differences.
  const auto eps1 = catalog::get("vsi-eps1").model();
  const auto& xi1 = eps1.field("xi1");
  const Point q = catalog::get("vsi-eps1").probe.start;
  const auto j = flow_jacobian(xi1, q, 0.1);
  const double h = 1e-5;
  for (int b = 0; b < 4; ++b) {
    auto plus = q;
    auto minus = q;
    plus[b] += h;
    minus[b] -= h;
    const auto fp = integrate_flow(xi1, plus, 0.1);
    const auto fm = integrate_flow(xi1, minus, 0.1);
    for (int a = 0; a < 4; ++a) CHECK(testing::close(j(a, b), (fp[a] - fm[a]) / (2 * h), 1e-6, 1e-7));
  }
}

TEST_CASE("boost map is the flow of xi5 about the origin") {
  const auto model = catalog::get("neutral-csi").model();
  const Point p{0.3, -0.7, 0.2, 0.9};
  for (double t : {-1.0, 0.5, 2.0}) {
    const auto map = boost_map(model.metric.chart(), {0, 0, 0, 0}, t);
    check_points(map(p), integrate_flow(model.field("xi5"), p, t), 1e-8 * std::exp(2 * std::abs(t)));
  }
  const Point center{0.1, 0.2, 0.3, 0.4};
  check_points(boost_map(model.metric.chart(), center, 3.0)(center), center, 1e-15);
}

TEST_CASE("pullbacks of covariant 2-tensors") {
  const Chart chart = plane_chart();
  const TwoTensorField du2 = [](const Point& x) {
    TensorValue t(2, {Variance::Lower, Variance::Lower}, 0.0, x);
    t(0, 0) = 1.0;
    return t;
  };
  const Point p{0.3, -0.2};
  const auto doubled = pullback_two_tensor(map_of({"2*x", "2*y"}, chart), du2, p);
  CHECK(doubled(0, 0) == 4.0);
  CHECK(doubled(0, 1) == 0.0);
  CHECK(doubled(1, 1) == 0.0);

  const TwoTensorField varying = [](const Point& x) {
    TensorValue t(2, {Variance::Lower, Variance::Lower}, 0.0, x);
    t(0, 0) = 1 + x[0] * x[1];
    t(0, 1) = t(1, 0) = std::sin(x[0]);
    t(1, 1) = std::exp(x[1]);
    return t;
  };
  const auto same = pullback_two_tensor(map_of({"x", "y"}, chart), varying, p);
  const auto direct = varying(p);
  for (std::size_t k = 0; k < 4; ++k) CHECK(same.data()[k] == direct.data()[k]);

  // A rotation preserves the flat metric.
  const TwoTensorField flat = [](const Point& x) {
    TensorValue t(2, {Variance::Lower, Variance::Lower}, 0.0, x);
    t(0, 0) = t(1, 1) = 1.0;
    return t;
  };
  const auto rotated = pullback_two_tensor(map_of({"cos(0.3)*x - sin(0.3)*y", "sin(0.3)*x + cos(0.3)*y"}, chart),
                                           flat, p);
  CHECK(rotated(0, 0) == doctest::Approx(1.0));
  CHECK(std::abs(rotated(0, 1)) < 1e-15);
  CHECK(rotated(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("Killing flows pull the metric back to itself") {
  for (const auto& id : catalog::list()) {
    const auto& entry = catalog::get(id);
    const auto model = entry.model();
    const auto p = entry.probe.start.empty() ? inner_point(model.metric) : entry.probe.start;
    const auto g = metric_at(model.metric, p, 0).metric_value();
    for (const auto& [name, verdict] : entry.expected) {
      if (verdict != Verdict::Killing) continue;
      const auto pulled = pullback_metric_by_flow(model.metric, model.field(name), p, 0.2);
      for (int a = 0; a < model.metric.dim(); ++a)
        for (int b = 0; b < model.metric.dim(); ++b)
          CHECK_MESSAGE(std::abs(pulled(a, b) - g(a, b)) <= 1e-9 * std::max(1.0, g.norm()), id << "/" << name);
    }
  }
}

TEST_CASE("invariant preservation along orbits") {
  SUBCASE("neutral translation") {
    const auto model = catalog::get("intro-neutral").model();
    const std::vector<double> times{0.5, -0.5, 1.0, -1.0};
    const auto r = ipd_check(model.metric, model.field("dv"), {0.3, 0.5, 0.2, 0.1}, times);
    CHECK(r.ipd_on_orbit);
    CHECK_FALSE(r.truncated);
    CHECK(r.orbit.size() == 4);
    CHECK(r.max_deviation <= r.tolerance);
  }
  SUBCASE("flat space") {
    const auto model = catalog::get("minkowski4").model();
    const std::vector<double> times{0.3, -0.3};
    for (const auto& f : model.fields) CHECK(ipd_check(model.metric, f, {0.1, 0.2, -0.1, 0.3}, times).ipd_on_orbit);
  }
  SUBCASE("warped plane fails along u") {
    const auto model = catalog::get("warped-plane").model();
    const std::vector<double> times{0.5, -0.3};
    const auto r = ipd_check(model.metric, model.field("du"), {-0.2, 0.2}, times);
    CHECK_FALSE(r.ipd_on_orbit);
    CHECK(r.max_deviation > 0.1);
    CHECK(ipd_check(model.metric, model.field("dw"), {-0.2, 0.2}, times).ipd_on_orbit);
  }
  SUBCASE("escape truncates") {
    const auto model = catalog::get("warped-plane").model();
    const std::vector<double> times{0.2, 0.8, 0.1};
    const auto r = ipd_check(model.metric, model.field("dw"), {0.1, 0.5}, times);
    CHECK(r.truncated);
    REQUIRE(r.truncated_at.has_value());
    CHECK(*r.truncated_at == 0.8);
    CHECK(r.orbit.size() == 1);
    CHECK_FALSE(r.ipd_on_orbit);
    CHECK_FALSE(r.truncation_reason.empty());
  }
  SUBCASE("inadmissible start") {
    const auto model = catalog::get("vsi-eps1").model();
    const std::vector<double> times{0.1};
    CHECK_THROWS_AS(ipd_check(model.metric, model.field("dx2"), {0.3, 0.5, 0.0, 0.1}, times), SingularPointError);
  }
  SUBCASE("every expectation in the catalog") {
    for (const auto& id : catalog::list()) {
      const auto& entry = catalog::get(id);
      const auto model = entry.model();
      const auto p = entry.probe.start.empty() ? inner_point(model.metric) : entry.probe.start;
      const std::vector<double> fallback{0.1, -0.1};
      const auto& times = entry.probe.times.empty() ? fallback : entry.probe.times;
      for (const auto& [name, expected] : entry.expected_ipd)
        CHECK_MESSAGE(ipd_check(model.metric, model.field(name), p, times).ipd_on_orbit == expected, id << "/" << name);
    }
  }
}
