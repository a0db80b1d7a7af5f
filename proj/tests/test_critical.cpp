#include "almgren/critical.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace almgren;

namespace {

const Domain upper = Domain::upper_half_plane();

Field two_xy() { return AnalyticField::harmonic_polynomial(2, 2, {0.0, 1.0}, upper); }
Field im_z3() { return AnalyticField::harmonic_polynomial(2, 3, {0.0, 1.0}, upper); }
Field y_plus() { return AnalyticField::one_sided_linear(make_point({0.0, 1.0})); }
Field wedge(double alpha) { return AnalyticField::wedge_eigenfunction(alpha, 1); }

const Balld unit_region(make_point({0.0, 0.0}), 0.5);

int count_kind(const std::vector<CriticalPoint> &pts, CriticalKind kind) {
  int c = 0;
  for (const auto &p : pts)
    c += p.kind == kind;
  return c;
}

} // namespace

TEST_CASE("interior critical point of Re z^2 at the origin") {
  const Domain d = Domain::whole_space(2);
  const Field f = AnalyticField::harmonic_polynomial(2, 2, {1.0, 0.0}, d);
  const auto pts = critical_points(f, d, unit_region, 1.0 / 16, 1e-10);
  REQUIRE(pts.size() == 1);
  CHECK(pts[0].kind == CriticalKind::interior);
  CHECK(pts[0].location.norm() <= 1e-10);
  CHECK(pts[0].gradient_norm <= 1e-10);
}

TEST_CASE("interior critical points away from lattice nodes") {
  const Domain d = Domain::whole_space(2);
  const Field base = AnalyticField::harmonic_polynomial(2, 2, {1.0, 0.0}, d);
  const Field f = base.transformed(1.0, 1.0, make_point({-0.137, 0.211}), 0.0);
  auto pts = critical_points(f, d, unit_region, 1.0 / 16, 1e-10);
  REQUIRE(pts.size() == 1);
  CHECK((pts[0].location - make_point({0.137, -0.211})).norm() <= 1e-9);

  // Degenerate Hessian at the root.
  const Field cubic = AnalyticField::harmonic_polynomial(2, 3, {1.0, 0.0}, d);
  pts = critical_points(cubic, d, unit_region, 1.0 / 16, 1e-10);
  REQUIRE(pts.size() == 1);
  CHECK(pts[0].location.norm() <= 1e-5);
  CHECK(pts[0].gradient_norm <= 1e-10);
}

TEST_CASE("boundary critical points") {
  SUBCASE("2xy has a flat boundary critical point at 0") {
    const auto pts = critical_points(two_xy(), upper, unit_region, 1.0 / 16, 1e-10);
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].kind == CriticalKind::boundary_flat);
    CHECK(pts[0].location.norm() <= 1e-9);
    CHECK(std::abs(pts[0].normal_derivative) <= 1e-10);
  }
  SUBCASE("Im z^3 has a double zero of the normal derivative at 0") {
    const auto pts = critical_points(im_z3(), upper, unit_region, 1.0 / 16, 1e-10);
    REQUIRE(count_kind(pts, CriticalKind::boundary_flat) == 1);
    CHECK(pts[0].location.norm() <= 1e-5);
  }
  SUBCASE("y+ has none") {
    const auto pts = critical_points(y_plus(), upper, unit_region, 1.0 / 16, 1e-10);
    CHECK(pts.empty());
  }
  SUBCASE("wedge vertex is singular") {
    const Domain w = Domain::wedge(2 * pi / 3);
    const auto pts = critical_points(wedge(2 * pi / 3), w, unit_region, 1.0 / 16, 1e-10);
    REQUIRE(count_kind(pts, CriticalKind::boundary_singular) == 1);
    CHECK(count_kind(pts, CriticalKind::interior) == 0);
    CHECK(count_kind(pts, CriticalKind::boundary_flat) == 0);
    for (const auto &p : pts)
      if (p.kind == CriticalKind::boundary_singular)
        CHECK(p.location.norm() <= 1e-12);
  }
}

TEST_CASE("normal derivative quotient") {
  CHECK(normal_derivative(two_xy(), upper, make_point({0.3, 0.0})) == doctest::Approx(0.6).epsilon(1e-10));
  CHECK(normal_derivative(im_z3(), upper, make_point({0.5, 0.0})) == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(normal_derivative(y_plus(), upper, make_point({-0.2, 0.0})) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(normal_derivative(two_xy(), upper, make_point({0.0, 0.3})), ValidationError);
}

TEST_CASE("blow-ups at oracle points") {
  SUBCASE("wedge vertices: N0 = a = pi / alpha") {
    for (double alpha : {pi, 3 * pi / 4, 2 * pi / 3, pi / 2}) {
      const Domain w = Domain::wedge(alpha);
      const auto t = blowup_trace(wedge(alpha), w, make_point({0.0, 0.0}));
      CHECK(t.N0 == doctest::Approx(pi / alpha).epsilon(0.02));
      CHECK(t.exponent == doctest::Approx(pi / alpha).epsilon(0.02));
      CHECK(t.exponent_gap <= 0.05);
      CHECK(t.monotone);
      if (alpha < pi)
        CHECK(t.N0 - 1.0 == doctest::Approx(pi / alpha - 1.0).epsilon(0.02));
    }
  }
  SUBCASE("2xy and Im z^3 at 0") {
    auto t = blowup_trace(two_xy(), upper, make_point({0.0, 0.0}));
    CHECK(t.N0 == doctest::Approx(2.0).epsilon(0.02));
    CHECK(t.exponent_gap <= 0.05);
    t = blowup_trace(im_z3(), upper, make_point({0.0, 0.0}));
    CHECK(t.N0 == doctest::Approx(3.0).epsilon(0.02));
    CHECK(t.exponent_gap <= 0.05);
  }
  SUBCASE("flat non-critical points have N0 = 1") {
    for (double x : {-0.4, 0.1, 0.35}) {
      auto t = blowup_trace(y_plus(), upper, make_point({x, 0.0}));
      CHECK(t.N0 == doctest::Approx(1.0).epsilon(0.02));
      t = blowup_trace(two_xy(), upper, make_point({x, 0.0}), 0.5, 12);
      CHECK(t.N0 >= 1.0 - 0.02);
      CHECK(t.N0 == doctest::Approx(1.0).epsilon(0.02));
      CHECK(t.monotone);
      CHECK(t.exponent_gap <= 0.05);
    }
  }
  SUBCASE("scales follow the ratio") {
    const auto t = blowup_trace(two_xy(), upper, make_point({0.0, 0.0}), 0.25, 6);
    REQUIRE(t.scales.size() == 6);
    for (std::size_t j = 0; j < 6; ++j)
      CHECK(t.scales[j].r == doctest::Approx(std::pow(0.25, j)));
  }
  CHECK_THROWS_AS(blowup_trace(two_xy(), upper, make_point({0.0, -0.1})), DomainError);
  CHECK_THROWS_AS(blowup_trace(two_xy(), upper, make_point({0.0, 0.0}), 1.5), InvalidScale);
}

TEST_CASE("estimated N0 on critical points") {
  CriticalOptions opt;
  opt.estimate_N0 = true;
  const auto pts = critical_points(two_xy(), upper, unit_region, 1.0 / 16, 1e-10, opt);
  REQUIRE(pts.size() == 1);
  CHECK(pts[0].N0 == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("epsilon regularity") {
  CHECK(epsilon_regularity_check(two_xy(), upper, make_point({0.0, 0.0})));
  CHECK(epsilon_regularity_check(im_z3(), upper, make_point({0.0, 0.0})));
  const auto rep = epsilon_regularity_report(im_z3(), upper, make_point({0.0, 0.0}));
  CHECK(rep.N0 == doctest::Approx(3.0).epsilon(0.02));

  CHECK_THROWS_AS(epsilon_regularity_check(y_plus(), upper, make_point({0.0, 0.0})), ValidationError);
  const auto lin = epsilon_regularity_report(y_plus(), upper, make_point({0.0, 0.0}));
  CHECK(lin.N0 == doctest::Approx(1.0).epsilon(0.02));
  CHECK_FALSE(lin.member);
  CHECK_FALSE(lin.passed);

  CHECK_THROWS_AS(epsilon_regularity_check(two_xy(), upper, make_point({0.0, 0.2})), ValidationError);
  const Domain w = Domain::wedge(2 * pi / 3);
  CHECK_THROWS_AS(epsilon_regularity_check(wedge(2 * pi / 3), w, make_point({0.0, 0.0})), ValidationError);
}

TEST_CASE("every flat boundary critical point passes epsilon regularity") {
  for (const Field &f : {two_xy(), im_z3()})
    for (const auto &c : critical_points(f, upper, unit_region, 1.0 / 16, 1e-10))
      if (c.kind == CriticalKind::boundary_flat)
        CHECK(epsilon_regularity_check(f, upper, c.location, 0.01, 1e-9));
}

TEST_CASE("minkowski content") {
  const std::vector<double> radii{0.1, 0.05, 0.025};
  for (const auto &row : minkowski_content({make_point({0.0, 0.0})}, 0.0, radii))
    CHECK(row.content == doctest::Approx(pi / 4).epsilon(0.01));

  std::vector<Point> seg;
  for (int i = 0; i <= 4000; ++i)
    seg.push_back(make_point({i / 4000.0, 0.0}));
  for (const auto &row : minkowski_content(seg, 1.0, radii))
    CHECK(row.content == doctest::Approx(1.0 + pi * row.r / 2).epsilon(0.01));

  for (const auto &row : minkowski_content({}, 0.0, radii))
    CHECK(row.content == 0.0);
  CHECK_THROWS_AS(minkowski_content({}, 0.0, {0.1, 0.2}), InvalidScale);
}

TEST_CASE("csv output") {
  std::ostringstream os;
  write_critical_csv(os, critical_points(two_xy(), upper, unit_region, 1.0 / 16, 1e-10));
  CHECK(os.str().rfind("x,y,kind,gradient_norm,normal_derivative,N0\n", 0) == 0);
  CHECK(os.str().find("boundary_flat") != std::string::npos);
  std::ostringstream ts;
  write_trace_csv(ts, blowup_trace(two_xy(), upper, make_point({0.0, 0.0}), 0.5, 4));
  const std::string text = ts.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 5);
}
