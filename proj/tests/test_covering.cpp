#include "almgren/covering.hpp"

#include <doctest.h>

using namespace almgren;

namespace {

const Domain upper = Domain::upper_half_plane();

Field two_xy() { return AnalyticField::harmonic_polynomial(2, 2, {0.0, 1.0}, upper); }
Field y_plus() { return AnalyticField::one_sided_linear(make_point({0.0, 1.0})); }

// Re(z^3) - 3 a^2 Re(z): interior critical points at (+-a, 0).
Field two_critical(double a) {
  const Domain d = Domain::whole_space(2);
  return Field(solve_dirichlet(
      d, [a](const Point &x) { return x[0] * x[0] * x[0] - 3 * x[0] * x[1] * x[1] - 3 * a * a * x[0]; }, 64));
}

CoverParams params(double R, int k = 0) {
  CoverParams P;
  P.R = R;
  P.k = k;
  return P;
}

} // namespace

TEST_CASE("cover parameter validation") {
  CoverParams P;
  CHECK_NOTHROW(P.validate());
  P.rho = 0.2;
  CHECK_THROWS_AS(P.validate(), ValidationError);
  P = CoverParams{};
  P.eta = 0.05;
  CHECK_THROWS_AS(P.validate(), ValidationError);
  P = CoverParams{};
  P.R = 1.0;
  CHECK_THROWS_AS(P.validate(), ValidationError);
  CHECK(std::string(tag_name(BallTag::stop)) == "stop");
}

TEST_CASE("tubular volume by lattice counting") {
  CHECK(tubular_volume({}, 0.1, 0.01) == 0.0);
  for (double r : {0.5, 0.1, 0.01}) {
    const double v = tubular_volume({zero_point(2)}, r, r / 8);
    CHECK(v / (r * r) == doctest::Approx(pi).epsilon(0.03));
  }
  CHECK(tubular_volume({zero_point(2)}, 1.0, 1.0 / 64) == doctest::Approx(pi).epsilon(1e-3));
  CHECK(tubular_volume({zero_point(3)}, 1.0, 1.0 / 32) == doctest::Approx(4 * pi / 3).epsilon(1e-2));
  // Overlapping balls are counted once.
  const double one = tubular_volume({zero_point(2)}, 0.2, 0.01);
  CHECK(tubular_volume({zero_point(2), zero_point(2)}, 0.2, 0.01) == one);
}

TEST_CASE("ball classification") {
  const Balld region(zero_point(2), 0.25);
  const Field f = y_plus();
  CoverContext lin(f, f.domain(), region, params(1.0 / 16));
  CHECK(lin.strata().empty());
  for (const Balld &b : {Balld(zero_point(2), 0.25), Balld(make_point({0.1, 0.1}), 0.05)})
    CHECK(classify_ball(lin, b).tag == BallTag::good);

  const Field g = two_xy();
  CoverContext ctx(g, upper, region, params(1.0 / 16));
  CHECK(ctx.E() == doctest::Approx(2.0).epsilon(1e-3));
  REQUIRE(!ctx.strata().empty());
  const Classification c = classify_ball(ctx, Balld(zero_point(2), 0.125));
  CHECK(c.tag == BallTag::good);
  REQUIRE(c.witness_value);
  CHECK(*c.witness_value == doctest::Approx(2.0).epsilon(1e-6));
  const Classification far = classify_ball(ctx, Balld(make_point({0.1, 0.05}), 1.0 / 32));
  CHECK(far.tag == BallTag::good);
  CHECK_FALSE(far.witness_value);
}

TEST_CASE("good trees") {
  const Balld region(zero_point(2), 0.25);
  const Field f = y_plus();
  CoverContext lin(f, f.domain(), region, params(1.0 / 64));
  std::vector<BallNode> nodes(1);
  nodes[0].id = 0;
  nodes[0].center = zero_point(2);
  nodes[0].radius = 0.125;
  const TreeReport empty = good_tree(lin, nodes, 0);
  CHECK(empty.leaves.empty());
  CHECK(empty.stops.empty());

  const Field g = two_xy();
  CoverContext ctx(g, upper, region, params(1.0 / 64));
  std::vector<BallNode> tree(1);
  tree[0].id = 0;
  tree[0].center = zero_point(2);
  tree[0].radius = 0.125;
  const TreeReport t = good_tree(ctx, tree, 0);
  CHECK(!t.stops.empty());
  CHECK(t.stops.size() <= 4);
  for (int s : t.stops) {
    CHECK(tree[s].center.norm() <= 0.05);
    CHECK(tree[s].radius >= 0.1 / 64 * (1 - 1e-12));
    CHECK(tree[s].radius <= 1.0 / 64 * (1 + 1e-12));
  }
  CHECK(t.leaf_packing <= 1.0);
  CHECK(t.size_control);
  CHECK(t.covering_control);
}

TEST_CASE("bad trees send every stratum point to stop balls when k = 0") {
  const Field f = two_critical(0.1);
  const Balld region(zero_point(2), 0.2);
  CoverParams P = params(1.0 / 16);
  P.lattice_step = 0.2 / 16;
  CoverContext ctx(f, f.domain(), region, P);
  REQUIRE(!ctx.strata().empty());
  for (const Point &c : {make_point({0.1, 0.0}), make_point({-0.1, 0.0})}) {
    bool found = false;
    for (const auto &q : ctx.strata())
      found = found || (q - c).norm() <= 1e-12;
    CHECK(found);
  }

  std::vector<BallNode> nodes(1);
  nodes[0].id = 0;
  nodes[0].center = region.center;
  nodes[0].radius = region.radius;
  const Classification c = classify_ball(ctx, region);
  REQUIRE(c.tag == BallTag::bad);
  CHECK_FALSE(c.plane);
  nodes[0].tag = c.tag;
  const TreeReport t = bad_tree(ctx, nodes, 0);
  CHECK(t.leaves.empty());
  CHECK(t.stops.size() == ctx.strata().size());
  for (int s : t.stops) {
    CHECK(nodes[s].parent == 0);
    CHECK(nodes[s].radius == doctest::Approx(P.eta * region.radius));
  }
  CHECK(t.size_control);
  CHECK(t.covering_control);
  MESSAGE("bad-tree leaf packing / (2 rho r_A^k): " << t.leaf_packing / (2 * P.rho));
}

TEST_CASE("bad root with empty small-drop set when k = 1") {
  const Field f = two_critical(0.1);
  const Balld region(zero_point(2), 0.2);
  CoverParams P = params(1.0 / 16, 1);
  P.lattice_step = 0.05;
  CoverContext ctx(f, f.domain(), region, P);
  REQUIRE(!ctx.strata().empty());
  const Classification c = classify_ball(ctx, region);
  REQUIRE(c.tag == BallTag::bad);
  CHECK(c.small_drop == 0);
  CHECK_FALSE(c.plane);
  std::vector<BallNode> nodes(1);
  nodes[0].id = 0;
  nodes[0].center = region.center;
  nodes[0].radius = region.radius;
  nodes[0].tag = BallTag::bad;
  const TreeReport t = bad_tree(ctx, nodes, 0);
  CHECK(t.leaves.empty());
  CHECK(t.stops.size() == ctx.strata().size());
  CHECK(t.covering_control);
}

TEST_CASE("linear field has an empty cover") {
  const Field f = y_plus();
  const CoverResult res = build_cover(f, f.domain(), Balld(zero_point(2), 0.25), params(1.0 / 16));
  CHECK(res.cover.empty());
  CHECK(res.covered);
  CHECK(res.packing == 0.0);
}

TEST_CASE("cover cardinality is bounded across R") {
  const Field g = two_xy();
  const Balld region(zero_point(2), 0.25);
  std::size_t largest = 0;
  for (int e = 3; e <= 6; ++e) {
    const double R = std::ldexp(1.0, -e);
    const CoverResult res = build_cover(g, upper, region, params(R));
    CHECK(res.covered);
    CHECK(res.radius_laws);
    CHECK(!res.cover.empty());
    CHECK(res.count_R_k == static_cast<double>(res.cover.size()));
    for (const auto &b : res.cover)
      CHECK(b.radius >= R);
    largest = std::max(largest, res.cover.size());
  }
  CHECK(largest <= 4);
}

TEST_CASE("grid-solved wedge cover") {
  const Domain d = Domain::wedge(2 * pi / 3);
  const Field exact = AnalyticField::wedge_eigenfunction(2 * pi / 3, 1);
  const Field g(solve_dirichlet(d, [&](const Point &x) { return eval(exact, x); }, 128));
  const Balld region(zero_point(2), 0.25);
  std::vector<std::size_t> sizes;
  for (int e : {3, 6}) {
    const CoverResult res = build_cover(g, d, region, params(std::ldexp(1.0, -e)));
    CHECK(res.finest_scale == doctest::Approx(1.0 / 128));
    CHECK(res.covered);
    CHECK(res.radius_laws);
    bool vertex = false;
    for (const auto &b : res.cover)
      vertex = vertex || b.center.norm() <= 1e-12;
    CHECK(vertex);
    sizes.push_back(res.cover.size());
  }
  CHECK(sizes[0] == sizes[1]);
  CHECK(sizes[0] <= 16);
}

TEST_CASE("volume estimates") {
  const Field g = two_xy();
  const Balld region(zero_point(2), 0.25);
  const std::vector<double> radii{0.125, 0.0625, 0.03125, 0.015625};
  const auto rows = volume_estimate(g, upper, region, 0, 0.25, radii);
  REQUIRE(rows.size() == radii.size());
  for (const auto &row : rows) {
    CHECK(row.members == 1);
    CHECK(row.ratio == doctest::Approx(pi).epsilon(0.03));
    CHECK(row.minkowski == doctest::Approx(row.ratio / 4));
  }
  for (std::size_t i = 1; i < rows.size(); ++i)
    CHECK(rows[i].ratio <= rows[i - 1].ratio * 1.1);

  const Field f = y_plus();
  for (const auto &row : volume_estimate(f, f.domain(), region, 0, 0.25, {0.125, 0.0625}))
    CHECK(row.ratio == 0.0);
  CHECK_THROWS_AS(volume_estimate(g, upper, region, 0, 0.25, {0.0625, 0.125}), ValidationError);
}
