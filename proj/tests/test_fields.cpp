#include "almgren/fields.hpp"

#include <doctest.h>

#include <complex>
#include <random>

using namespace almgren;

namespace {

Field re_z2(const Domain &d) { return AnalyticField::harmonic_polynomial(2, 2, {1.0, 0.0}, d); }
Field two_xy(const Domain &d) { return AnalyticField::harmonic_polynomial(2, 2, {0.0, 1.0}, d); }

double sup_error_on_ball(const Field &grid, const Field &exact, double radius, double step) {
  double worst = 0.0;
  for (double x = -radius; x <= radius; x += step)
    for (double y = -radius; y <= radius; y += step) {
      const Point p = make_point({x, y});
      if (p.norm() > radius)
        continue;
      worst = std::max(worst, std::abs(eval(grid, p) - eval(exact, p)));
    }
  return worst;
}

} // namespace

TEST_CASE("harmonic basis is harmonic and homogeneous") {
  for (int dim : {2, 3})
    for (int d = 0; d <= 5; ++d) {
      const auto basis = harmonic_basis(dim, d);
      CHECK(basis.size() == static_cast<std::size_t>(dim == 2 ? (d == 0 ? 1 : 2) : 2 * d + 1));
      for (const auto &p : basis) {
        CHECK(p.laplacian().is_zero(1e-9));
        CHECK(!p.is_zero());
        CHECK(p.degree() == d);
        for (const auto &[e, c] : p.terms())
          CHECK(e[0] + e[1] + e[2] == d);
      }
    }
  CHECK_THROWS_AS(harmonic_basis(2, -1), DomainError);
  CHECK_THROWS_AS(harmonic_basis(4, 1), DomainError);
}

TEST_CASE("polynomial calculus") {
  const auto b = harmonic_basis(2, 3);
  const Point x = make_point({0.7, -0.4});
  const std::complex<double> z(0.7, -0.4);
  CHECK(b[0].eval(x) == doctest::Approx(std::real(z * z * z)));
  CHECK(b[1].eval(x) == doctest::Approx(std::imag(z * z * z)));
  const Vector g = b[0].gradient(x);
  const double h = 1e-6;
  CHECK(g[0] == doctest::Approx((b[0].eval(make_point({0.7 + h, -0.4})) - b[0].eval(make_point({0.7 - h, -0.4}))) /
                                (2 * h))
                     .epsilon(1e-7));
  CHECK(b[0].derivative(1).eval(x) == doctest::Approx(g[1]));
}

TEST_CASE("analytic evaluation") {
  const Field half_line = AnalyticField::wedge_eigenfunction(pi, 1);
  CHECK(eval(half_line, make_point({0.0, 1.0})) == doctest::Approx(1.0));
  CHECK(eval(re_z2(Domain::whole_space(2)), make_point({1.0, 1.0})) == doctest::Approx(0.0));
  const Field wedge = AnalyticField::wedge_eigenfunction(2 * pi / 3, 1);
  CHECK(eval(wedge, make_point({std::cos(pi / 3), std::sin(pi / 3)})) == doctest::Approx(1.0));
  CHECK(eval(wedge, make_point({0.0, -1.0})) == 0.0);
  const Field wedge3 = AnalyticField::wedge_eigenfunction(2 * pi / 3, 1, 3);
  CHECK(eval(wedge3, make_point({std::cos(pi / 3), std::sin(pi / 3), 5.0})) == doctest::Approx(1.0));
}

TEST_CASE("analytic gradients") {
  const Field linear = AnalyticField::one_sided_linear(make_point({0.0, 1.0}));
  const auto g1 = gradient(linear, make_point({0.0, 0.5}));
  CHECK(!g1.exterior);
  CHECK(g1.value[0] == doctest::Approx(0.0));
  CHECK(g1.value[1] == doctest::Approx(1.0));
  const auto g2 = gradient(re_z2(Domain::whole_space(2)), make_point({1.0, 0.0}));
  CHECK(g2.value[0] == doctest::Approx(2.0));
  CHECK(g2.value[1] == doctest::Approx(0.0));
  // r^2 sin(2 theta) = 2xy on the quarter plane
  const Field quarter = AnalyticField::wedge_eigenfunction(pi / 2, 1);
  const auto g3 = gradient(quarter, make_point({0.5, 0.5}));
  CHECK(g3.value[0] == doctest::Approx(1.0));
  CHECK(g3.value[1] == doctest::Approx(1.0));
  const auto outside = gradient(linear, make_point({0.0, -0.5}));
  CHECK(outside.exterior);
  CHECK(outside.value.isZero(0.0));

  const Field wedge = AnalyticField::wedge_eigenfunction(2 * pi / 3, 1);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const Point x = make_point({u(rng), u(rng)});
    if (contains(wedge.domain(), x) != Membership::interior || x.norm() < 0.05)
      continue;
    const double h = 1e-6;
    const auto g = gradient(wedge, x).value;
    for (int a = 0; a < 2; ++a) {
      Point xp = x, xm = x;
      xp[a] += h;
      xm[a] -= h;
      CHECK(g[a] == doctest::Approx((eval(wedge, xp) - eval(wedge, xm)) / (2 * h)).epsilon(1e-5));
    }
  }
}

TEST_CASE("zero extension and mean value property") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const Field wedge = AnalyticField::wedge_eigenfunction(2 * pi / 3, 1);
  const Field poly = AnalyticField::harmonic_polynomial(2, 3, {0.3, -1.1}, Domain::upper_half_plane());
  int checked = 0;
  while (checked < 1000) {
    const Point x = make_point({u(rng), u(rng)});
    if (contains(wedge.domain(), x) == Membership::exterior) {
      CHECK(eval(wedge, x) == 0.0);
      ++checked;
    }
    if (contains(poly.domain(), x) == Membership::exterior)
      CHECK(eval(poly, x) == 0.0);
  }

  const Point c = make_point({0.2, 1.3});
  for (int count : {64, 720}) {
    double avg = 0.0;
    for (const auto &n : sphere_samples(Balld(c, 0.9), count))
      avg += n.weight * eval(poly, n.point);
    avg /= 2 * pi * 0.9;
    CHECK(avg == doctest::Approx(eval(poly, c)).epsilon(1e-8));
  }
  const Field solid = AnalyticField::harmonic_polynomial(3, 3, {0.5, 1.0, -0.2, 0.7, 0.1, 0.4, -0.9},
                                                         Domain::whole_space(3));
  const Point c3 = make_point({0.1, -0.2, 0.3});
  double avg = 0.0;
  for (const auto &n : sphere_samples(Balld(c3, 0.5), 20000))
    avg += n.weight * eval(solid, n.point);
  avg /= 4 * pi * 0.25;
  CHECK(std::abs(avg - eval(solid, c3)) < 1e-6);
}

TEST_CASE("transformed fields") {
  const Field f = two_xy(Domain::upper_half_plane());
  const Point p = make_point({0.3, 0.0});
  const Field w = f.transformed(2.0, 0.5, p, -1.0);
  const Point x = make_point({0.4, 0.6});
  CHECK(eval(w, x) == doctest::Approx(2.0 * eval(f, Point(p + 0.5 * x)) - 1.0));
  CHECK(gradient(w, x).value[1] == doctest::Approx(2.0 * 0.5 * gradient(f, Point(p + 0.5 * x)).value[1]));
  const Field ww = w.transformed(3.0, 0.25, make_point({0.1, 0.2}), 0.5);
  const Point y = p + 0.5 * (make_point({0.1, 0.2}) + 0.25 * x);
  CHECK(eval(ww, x) == doctest::Approx(3.0 * (2.0 * eval(f, y) - 1.0) + 0.5));
  CHECK_THROWS_AS(f.transformed(1.0, 0.0, p, 0.0), InvalidScale);
}

TEST_CASE("solver: linear data on the half-plane is exact") {
  SolveReport report;
  const GridField g = solve_dirichlet(
      Domain::upper_half_plane(), [](const Point &x) { return x[1]; }, 32, {}, &report);
  CHECK(report.residual <= 1e-9);
  const Field f(g);
  for (double x = -1.5; x <= 1.5; x += 0.173)
    for (double y = 0.0; y <= 1.3; y += 0.091)
      CHECK(std::abs(eval(f, make_point({x, y})) - y) <= 1e-6);
  CHECK_THROWS_AS(eval(f, make_point({3.0, 0.0})), DomainError);
}

TEST_CASE("solver: quadratic data on the half-plane") {
  const Domain d = Domain::upper_half_plane();
  const Field exact = two_xy(d);
  const Field g(solve_dirichlet(d, [&](const Point &x) { return eval(exact, x); }, 64));
  CHECK(sup_error_on_ball(g, exact, 1.0, 0.037) <= 5e-3);
  const auto grad = gradient(g, make_point({0.3, 0.4})).value;
  CHECK(grad[0] == doctest::Approx(0.8).epsilon(1e-2));
  CHECK(grad[1] == doctest::Approx(0.6).epsilon(1e-2));
}

TEST_CASE("solver: wedge eigenfunction at resolution 256") {
  const Domain d = Domain::wedge(2 * pi / 3);
  const Field exact = AnalyticField::wedge_eigenfunction(2 * pi / 3, 1);
  const Field g(solve_dirichlet(d, [&](const Point &x) { return eval(exact, x); }, 256));
  const double err = sup_error_on_ball(g, exact, 1.0, 0.0123);
  MESSAGE("wedge sup error " << err);
  CHECK(err <= 5e-3);
  const auto &mask = g.grid()->mask();
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i] == NodeClass::exterior)
      CHECK(g.grid()->values()[i] == 0.0);
}

TEST_CASE("solver: grid convergence on the wedge") {
  const Domain d = Domain::wedge(2 * pi / 3);
  const Field exact = AnalyticField::wedge_eigenfunction(2 * pi / 3, 1);
  auto data = [&](const Point &x) { return eval(exact, x); };
  const double coarse = sup_error_on_ball(Field(solve_dirichlet(d, data, 32)), exact, 1.0, 0.0123);
  const double fine = sup_error_on_ball(Field(solve_dirichlet(d, data, 64)), exact, 1.0, 0.0123);
  MESSAGE("errors " << coarse << " -> " << fine);
  CHECK(fine <= 0.5 * coarse);
}

TEST_CASE("solver: three-dimensional half-space") {
  const Domain d = Domain::half_space(make_point({0.0, 0.0, 1.0}));
  const Field g(solve_dirichlet(d, [](const Point &x) { return x[2]; }, 8));
  CHECK(std::abs(eval(g, make_point({0.2, -0.3, 0.5})) - 0.5) <= 1e-6);
}
