#include "almgren/geometry.hpp"

#include <doctest.h>

#include <random>

using namespace almgren;

namespace {

Point random_point(std::mt19937_64 &rng, int dim, double extent) {
  std::uniform_real_distribution<double> u(-extent, extent);
  Point x(dim);
  for (int i = 0; i < dim; ++i)
    x[i] = u(rng);
  return x;
}

} // namespace

TEST_CASE("membership on the upper half-plane and a wedge") {
  const Domain upper = Domain::upper_half_plane();
  CHECK(contains(upper, make_point({0.0, 1.0})) == Membership::interior);
  CHECK(contains(upper, make_point({3.0, 0.0})) == Membership::boundary);
  const Domain wedge = Domain::wedge(2 * pi / 3);
  CHECK(contains(wedge, make_point({0.0, -1.0})) == Membership::exterior);
  CHECK(contains(wedge, make_point({std::cos(pi / 3), std::sin(pi / 3)})) == Membership::interior);
  CHECK(contains(wedge, make_point({std::cos(2 * pi / 3), std::sin(2 * pi / 3)})) == Membership::boundary);
}

TEST_CASE("half-space normals are normalized") {
  Domain d(2, {{make_point({3.0, 4.0}), 5.0}});
  CHECK(d.halves()[0].normal.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.halves()[0].offset == doctest::Approx(1.0));
  CHECK_THROWS_AS(Domain(2, {{make_point({0.0, 0.0}), 1.0}}), DomainError);
  CHECK_THROWS_AS(Domain(4, {}), DomainError);
}

TEST_CASE("rescale_domain") {
  SUBCASE("cones are invariant about the vertex") {
    const Domain wedge = Domain::wedge(2 * pi / 3);
    const Domain scaled = rescale_domain(wedge, zero_point(2), 0.5);
    std::mt19937_64 rng(7);
    for (int i = 0; i < 1000; ++i) {
      const Point x = random_point(rng, 2, 2.0);
      CHECK(in_closure(wedge, x) == in_closure(scaled, x));
    }
    const Domain upper = rescale_domain(Domain::upper_half_plane(), zero_point(2), 2.0);
    for (int i = 0; i < 1000; ++i) {
      const Point x = random_point(rng, 2, 2.0);
      CHECK(contains(upper, x) == contains(Domain::upper_half_plane(), x));
    }
  }
  SUBCASE("unit square at scale one half") {
    const Domain square = Domain::box(make_point({0.0, 0.0}), make_point({1.0, 1.0}));
    const Domain big = rescale_domain(square, zero_point(2), 0.5);
    const Domain expected = Domain::box(make_point({0.0, 0.0}), make_point({2.0, 2.0}));
    REQUIRE(big.halves().size() == expected.halves().size());
    for (std::size_t i = 0; i < big.halves().size(); ++i)
      CHECK(big.halves()[i].same_face(expected.halves()[i]));
  }
  SUBCASE("membership transfers and scales compose") {
    const Domain square = Domain::box(make_point({-1.0, -0.5}), make_point({1.0, 0.7}));
    const Point p = make_point({0.3, -0.2});
    const Domain once = rescale_domain(square, p, 0.4);
    const Domain twice = rescale_domain(once, zero_point(2), 0.5);
    const Domain direct = rescale_domain(square, p, 0.2);
    std::mt19937_64 rng(11);
    for (int i = 0; i < 1000; ++i) {
      const Point x = random_point(rng, 2, 4.0);
      CHECK(contains(once, x) == contains(square, Point(0.4 * x + p)));
      CHECK(in_closure(twice, x) == in_closure(direct, x));
    }
  }
  CHECK_THROWS_AS(rescale_domain(Domain::upper_half_plane(), zero_point(2), 0.0), InvalidScale);
  CHECK_THROWS_AS(rescale_domain(Domain::upper_half_plane(), zero_point(2), -1.0), InvalidScale);
}

TEST_CASE("singular points") {
  CHECK(singular_points(Domain::upper_half_plane(), Balld(zero_point(2), 1.0)).empty());
  const auto v = singular_points(Domain::wedge(2 * pi / 3), Balld(zero_point(2), 1.0));
  REQUIRE(v.size() == 1);
  CHECK(v[0].norm() < 1e-12);
  const Domain square = Domain::box(make_point({-1.0, -1.0}), make_point({1.0, 1.0}));
  const auto c = singular_points(square, Balld(make_point({1.0, 1.0}), 0.5));
  REQUIRE(c.size() == 1);
  CHECK((c[0] - make_point({1.0, 1.0})).norm() < 1e-12);
  CHECK(singular_points(square, Balld(zero_point(2), 1.5)).size() == 4);
  CHECK(singular_points(Domain::wedge(pi), Balld(zero_point(2), 1.0)).empty());

  const Domain cube = Domain::box(make_point({-1.0, -1.0, -1.0}), make_point({1.0, 1.0, 1.0}));
  const auto edges = singular_points(cube, Balld(make_point({1.0, 1.0, 0.0}), 0.5));
  CHECK(!edges.empty());
  for (const auto &x : edges) {
    CHECK(contains(cube, x) == Membership::boundary);
    CHECK(!is_flat_boundary_point(cube, x));
  }
}

TEST_CASE("sphere samples") {
  const auto four = sphere_samples(Balld(zero_point(2), 1.0), 4);
  REQUIRE(four.size() == 4);
  for (const auto &n : four) {
    CHECK(n.weight == doctest::Approx(pi / 2));
    CHECK(n.point.norm() == doctest::Approx(1.0));
  }
  double total = 0.0;
  for (const auto &n : sphere_samples(Balld(zero_point(2), 2.0), 100))
    total += n.weight;
  CHECK(std::abs(total - 4 * pi) <= 1e-12 * 4 * pi);
  total = 0.0;
  for (const auto &n : sphere_samples(Balld(zero_point(3), 1.0), 1000)) {
    total += n.weight;
    CHECK(n.point.norm() == doctest::Approx(1.0));
  }
  CHECK(std::abs(total - 4 * pi) <= 1e-12 * 4 * pi);
}

TEST_CASE("arcs inside a domain") {
  const auto half = arcs_inside(Domain::upper_half_plane(), zero_point(2), 1.0);
  double len = 0.0;
  for (auto [a, b] : half)
    len += b - a;
  CHECK(len == doctest::Approx(pi));
  const auto wedge = arcs_inside(Domain::wedge(2 * pi / 3), zero_point(2), 0.3);
  REQUIRE(wedge.size() == 1);
  CHECK(wedge[0].first == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(wedge[0].second == doctest::Approx(2 * pi / 3));
  CHECK(arcs_inside(Domain::upper_half_plane(), make_point({0.0, 2.0}), 1.0).front().second ==
        doctest::Approx(2 * pi));
  CHECK(arcs_inside(Domain::upper_half_plane(), make_point({0.0, -2.0}), 1.0).empty());

  std::mt19937_64 rng(3);
  const Domain square = Domain::box(make_point({-0.4, -0.3}), make_point({0.5, 0.6}));
  for (int trial = 0; trial < 50; ++trial) {
    const Point c = random_point(rng, 2, 0.5);
    const auto arcs = arcs_inside(square, c, 0.45);
    for (int i = 0; i < 360; ++i) {
      const double t = 2 * pi * (i + 0.5) / 360;
      const Point x = c + 0.45 * make_point({std::cos(t), std::sin(t)});
      bool in_arc = false;
      for (auto [a, b] : arcs)
        in_arc = in_arc || (t >= a && t <= b);
      CHECK(in_arc == in_closure(square, x));
    }
  }
}

TEST_CASE("exit distance") {
  const Domain upper = Domain::upper_half_plane();
  auto [t, hit] = exit_distance<double>(upper, std::nullopt, make_point({0.0, 1.0}), make_point({0.0, -1.0}), 5.0);
  CHECK(t == doctest::Approx(1.0));
  CHECK(hit == 0);
  auto [t2, hit2] =
      exit_distance<double>(upper, Balld(zero_point(2), 2.0), make_point({0.0, 1.0}), make_point({0.0, 1.0}), 5.0);
  CHECK(t2 == doctest::Approx(1.0));
  CHECK(hit2 == -1);
  auto [t3, hit3] = exit_distance<double>(upper, std::nullopt, make_point({0.0, 1.0}), make_point({1.0, 0.0}), 0.5);
  CHECK(t3 == 0.5);
  CHECK(hit3 == -2);
}

TEST_CASE("geometry is generic in the scalar type") {
  using Pf = PointT<float>;
  ConvexDomain<float> d = ConvexDomain<float>::wedge(2.0f);
  Pf x(2);
  x << 0.5f, 0.5f;
  CHECK(contains(d, x) == Membership::interior);
  const auto r = rescale_domain(d, Pf(Pf::Zero(2)), 0.25f);
  CHECK(contains(r, x) == Membership::interior);
}

TEST_CASE("singular points lie on the boundary") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<HalfSpaced> halves;
    for (int f = 0; f < 6; ++f) {
      const double t = 2 * pi * f / 6 + 0.2 * std::uniform_real_distribution<double>(-1, 1)(rng);
      halves.push_back({make_point({std::cos(t), std::sin(t)}), 0.8});
    }
    const Domain hex(2, halves);
    const auto pts = singular_points(hex, Balld(zero_point(2), 2.0));
    CHECK(pts.size() == 6);
    for (const auto &x : pts)
      CHECK(contains(hex, x) == Membership::boundary);
  }
}
