#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "nilkill/catalog.hpp"
#include "nilkill/error.hpp"
#include "nilkill/geometry.hpp"
#include "support.hpp"

using namespace nilkill;

namespace {

Metric diagonal_metric(std::vector<std::string> coords, const std::vector<std::string>& diag,
                       std::vector<Interval> box) {
  MetricSpec spec;
  spec.chart.coordinates = std::move(coords);
  spec.chart.box = std::move(box);
  for (std::size_t a = 0; a < diag.size(); ++a)
    spec.set(static_cast<int>(a), static_cast<int>(a), diag[a]);
  return Metric(spec);
}

Metric catalog_metric(const char* id) { return catalog::get(id).model().metric; }

void check_vector(const InvariantVector& v, const std::vector<double>& expected, double rel,
                  double abs) {
  REQUIRE(v.values.size() >= expected.size());
  for (std::size_t k = 0; k < expected.size(); ++k)
    CHECK_MESSAGE(testing::close(v.values[k], expected[k], rel, abs),
                  v.names[k] << ": " << v.values[k] << " vs " << expected[k]);
}

}  // namespace

TEST_CASE("metric_at on the neutral introductory metric") {
  const auto m = catalog_metric("intro-neutral");
  const auto g = metric_at(m, {0.0, 1.0, 0.0, 0.0}, 1);
  CHECK(g.g(0, 1).value() == 1.0);
  CHECK(g.g(0, 0).value() == 0.0);
  CHECK(g.g(2, 3).value() == 1.0);
  CHECK(g.g(2, 2).value() == 2.0);
  CHECK(g.ginv(1, 1).value() == doctest::Approx(0.0));
  CHECK(g.ginv(0, 1).value() == doctest::Approx(1.0));
  CHECK(g.g(2, 2).d(1) == doctest::Approx(8.0));
  const Eigen::MatrixXd id = g.metric_value() * g.inverse_value();
  CHECK((id - Eigen::MatrixXd::Identity(4, 4)).norm() < 1e-14);
}

TEST_CASE("metric_at errors") {
  CHECK_THROWS_AS(metric_at(catalog_metric("vsi-eps1"), {0.3, 0.5, 0.0, 0.1}, 1), SingularPointError);
  const auto degenerate = diagonal_metric({"x", "y"}, {"1", "x"}, {{-1, 1}, {-1, 1}});
  CHECK_THROWS_AS(metric_at(degenerate, {0.0, 0.3}, 1), DegenerateMetricError);
  CHECK_THROWS_AS(metric_at(degenerate, {1e-12, 0.3}, 1), DegenerateMetricError);
  CHECK_NOTHROW(metric_at(degenerate, {1e-3, 0.3}, 1));
  CHECK_FALSE(degenerate.admissible({0.0, 0.3}));
  CHECK_THROWS_AS(invariant_vector(degenerate, {0.5, 0.3}, 2), OrderError);
  CHECK_THROWS_AS(christoffel(metric_at(degenerate, {0.5, 0.3}, 1)), OrderError);
}

TEST_CASE("chart validation") {
  MetricSpec spec;
  spec.chart.coordinates = {"x"};
  spec.chart.box = {{0, 1}};
  spec.set(0, 0, "1");
  CHECK_THROWS_AS(Metric{spec}, std::invalid_argument);
  spec.chart.coordinates = {"x", "x"};
  spec.chart.box = {{0, 1}, {0, 1}};
  CHECK_THROWS_AS(Metric{spec}, std::invalid_argument);
  spec.chart.coordinates = {"x", "y"};
  spec.chart.box = {{0, 1}};
  CHECK_THROWS_AS(Metric{spec}, std::invalid_argument);
  spec.chart.box = {{0, 1}, {0, 1}};
  spec.set(1, 1, "k*y");
  CHECK_THROWS_AS(Metric{spec}, BindError);
  spec.params["k"] = 2.0;
  CHECK_NOTHROW(Metric{spec});
}

TEST_CASE("flat metrics have vanishing curvature") {
  const auto flat = catalog_metric("minkowski4");
  const auto c = curvature_at(flat, {0.1, 0.2, 0.3, 0.4});
  for (const auto& j : c.gamma.data()) CHECK(j.value() == 0.0);
  for (const auto& j : c.riemann_up.data()) CHECK(j.value() == 0.0);
  check_vector(invariant_vector(c), {0, 0, 0, 0, 0}, 0, 0);
}

TEST_CASE("unit 2-sphere") {
  const auto m = catalog_metric("sphere2");
  const double th = std::numbers::pi / 3;
  const auto g = metric_at(m, {th, 0.5}, 2);
  const auto gamma = value_of(christoffel(g));
  CHECK(gamma(0, 1, 1) == doctest::Approx(-std::sqrt(3.0) / 4).epsilon(1e-14));
  CHECK(gamma(1, 0, 1) == doctest::Approx(1 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(gamma(1, 1, 0) == gamma(1, 0, 1));
  check_vector(invariant_vector(m, {th, 0.5}), {2, 2, 4, 0, 0}, 0, 1e-9);
  check_vector(invariant_vector(m, {1.0, 2.0}, 4), {2, 2, 4, 0, 0, 0}, 0, 1e-9);
}

TEST_CASE("unit 3-sphere") {
  const auto m = diagonal_metric({"ch", "th", "ph"}, {"1", "sin(ch)^2", "sin(ch)^2*sin(th)^2"},
                                 {{0.3, 2.8}, {0.3, 2.8}, {0, 6}});
  check_vector(invariant_vector(m, {0.7, 1.1, 1.0 / 3}), {6, 12, 12, 0, 0}, 1e-12, 1e-9);
}

TEST_CASE("Schwarzschild against closed forms") {
  const auto m = catalog_metric("schwarzschild");
  for (double r : {2.2, 2.5, 3.0, 4.7, 8.0}) {
    const auto v = invariant_vector(m, {0.3, r, 1.1, 2.0});
    CHECK(std::abs(v.values[0]) < 1e-12);
    CHECK(std::abs(v.values[1]) < 1e-12);
    CHECK(testing::close(v.values[2], 48 / std::pow(r, 6), 1e-10));
    CHECK(std::abs(v.values[3]) < 1e-12);
    CHECK(testing::close(v.values[4], 720 * (r - 2) / std::pow(r, 9), 1e-9));
  }
  CHECK(invariant_vector(m, {0.3, 2.5, 1.1, 2.0}).values[2] == doctest::Approx(0.196608).epsilon(1e-12));
}

TEST_CASE("warped plane curvature varies") {
  const auto m = catalog_metric("warped-plane");
  for (double u : {-0.8, -0.1, 0.0, 0.3, 0.9}) {
    const double f = 1 + u * u;
    const double r = -2 / (f * f);
    const double dr = 8 * u / std::pow(f, 3);
    const double ddr = 8 / std::pow(f, 3) - 48 * u * u / std::pow(f, 4);
    const double hess2 = ddr * ddr + std::pow(u * dr / f, 2);
    check_vector(invariant_vector(m, {u, 0.2}, 4), {r, r * r / 2, r * r, dr * dr, dr * dr, hess2},
                 1e-12, 1e-12);
  }
}

TEST_CASE("neutral and VSI examples have vanishing invariants") {
  const std::vector<std::vector<double>> intro_points{
      {0, 1, 0, 0}, {0.3, 0.5, 0.2, 0.1}, {-1.4, -1.5, 4.0 / 3, -5.0 / 7}};
  for (const auto& p : intro_points) check_vector(invariant_vector(catalog_metric("intro-neutral"), p), {0, 0, 0, 0, 0}, 0, 1e-11);
  for (const char* id : {"vsi-eps0", "vsi-eps1"})
    check_vector(invariant_vector(catalog_metric(id), {0.3, 0.5, 1.2, -0.4}), {0, 0, 0, 0, 0}, 0, 1e-11);
  check_vector(invariant_vector(catalog_metric("neutral-csi"), {-1.4, -1.5, 4.0 / 3, -5.0 / 7}), {0, 0, 0, 0, 0}, 0, 1e-10);
}

TEST_CASE("Kundt invariants are independent of v") {
  const auto m = catalog_metric("kundt");
  const std::vector<double> expected{94.0 / 25, 9849.0 / 1250, 8362.0 / 625, 36.0 / 25, -48.0 / 25};
  for (double v : {0.5, -1.5}) check_vector(invariant_vector(m, {0.3, v, 1.2, -0.4}), expected, 1e-12, 1e-12);
}

TEST_CASE("I-degenerate template invariants are independent of v") {
  const auto m = catalog_metric("ideg-template");
  const std::vector<double> expected{3401.0 / 1250, 15317363.0 / 1562500, 27540451.0 / 1562500,
                                     360088576.0 / 244140625};
  for (const auto& [v1, v2] : {std::pair{0.5, -1.0 / 3}, std::pair{-1.5, 1.4}})
    check_vector(invariant_vector(m, {0.3, -0.2, v1, v2, 0.4, 0.75}), expected, 1e-12, 1e-12);
}

TEST_CASE("Riemann symmetries on catalog points") {
  testing::Gen gen(31);
  for (const char* id : {"kundt", "ideg-template", "schwarzschild", "neutral-csi", "vsi-eps1"}) {
    const auto m = catalog_metric(id);
    const auto sample = sample_points(m, 5, 7);
    for (const auto& p : sample.points) {
      const auto c = curvature_at(m, p, 2);
      const auto up = value_of(c.riemann_up);
      const auto low = value_of(c.riemann_low);
      const int n = m.dim();
      double scale = 1e-300;
      for (double x : low.data()) scale = std::max(scale, std::abs(x));
      const double tol = 1e-10 * scale;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          for (int cc = 0; cc < n; ++cc)
            for (int d = 0; d < n; ++d) {
              CHECK(std::abs(up(a, b, cc, d) + up(a, cc, d, b) + up(a, d, b, cc)) <= tol * 10);
              CHECK(std::abs(low(a, b, cc, d) - low(cc, d, a, b)) <= tol);
              CHECK(std::abs(low(a, b, cc, d) + low(b, a, cc, d)) <= tol);
              CHECK(std::abs(low(a, b, cc, d) + low(a, b, d, cc)) <= tol);
            }
      const auto gamma = value_of(c.gamma);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          for (int cc = 0; cc < n; ++cc) CHECK(gamma(a, b, cc) == gamma(a, cc, b));
    }
  }
}

TEST_CASE("gradient of the scalar curvature matches finite differences") {
  for (const char* id : {"warped-plane", "kundt", "ideg-template"}) {
    const auto m = catalog_metric(id);
    const auto p = sample_points(m, 1, 3).points.at(0);
    const auto c = curvature_at(m, p, 3);
    const double h = 1e-4;
    for (int k = 0; k < m.dim(); ++k) {
      auto plus = p;
      auto minus = p;
      plus[k] += h;
      minus[k] -= h;
      const double fd = (curvature_at(m, plus, 2).scalar.value() - curvature_at(m, minus, 2).scalar.value()) / (2 * h);
      CHECK_MESSAGE(testing::close(c.scalar.d(k), fd, 1e-5, 1e-6), id << " d" << k);
    }
  }
}

TEST_CASE("raise and lower round-trip") {
  testing::Gen gen(32);
  const auto m = catalog_metric("ideg-template");
  const auto g = metric_at(m, sample_points(m, 1, 9).points.at(0), 0);
  const auto metric = g.metric_value();
  const auto inverse = g.inverse_value();
  TensorValue t(6, {Variance::Lower, Variance::Lower, Variance::Upper}, 0.0);
  for (auto& x : t.data()) x = gen.uniform(-1, 1);
  const auto back = lower_index(raise_index(t, 1, inverse), 1, metric);
  for (std::size_t k = 0; k < t.data().size(); ++k) CHECK(testing::close(back.data()[k], t.data()[k], 1e-12, 1e-12));
}

TEST_CASE("sampling is deterministic and admissible") {
  const auto m = catalog_metric("vsi-eps1");
  const auto a = sample_points(m, 50, 42);
  const auto b = sample_points(m, 50, 42);
  const auto c = sample_points(m, 50, 43);
  REQUIRE(a.points.size() == 50);
  CHECK(a.points == b.points);
  CHECK(a.points != c.points);
  for (const auto& p : a.points) {
    CHECK(m.admissible(p));
    CHECK(p[2] >= 0.1);
  }
  // An exclusion that covers everything exhausts the 50x candidate budget.
  MetricSpec spec = catalog::get("warped-plane").metric;
  spec.chart.exclude = parse("0*u");
  const auto none = sample_points(Metric(spec), 4, 1);
  CHECK(none.points.empty());
  CHECK(none.candidates == 200);
  CHECK(none.rejected == 200);
}
