#include "almgren/symmetry.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

using namespace almgren;

namespace {

const Domain upper = Domain::upper_half_plane();

Field two_xy() { return AnalyticField::harmonic_polynomial(2, 2, {0.0, 1.0}, upper); }
Field y_plus() { return AnalyticField::one_sided_linear(make_point({0.0, 1.0})); }
Field re_z2() { return AnalyticField::harmonic_polynomial(2, 2, {1.0, 0.0}, Domain::whole_space(2)); }
Field wedge() { return AnalyticField::wedge_eigenfunction(2 * pi / 3, 1); }

std::vector<double> ranks(const std::vector<double> &v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size(); ++i)
    r[idx[i]] = static_cast<double>(i);
  return r;
}

double spearman(const std::vector<double> &a, const std::vector<double> &b) {
  const auto ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(a.size());
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    d2 += (ra[i] - rb[i]) * (ra[i] - rb[i]);
  return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

} // namespace

TEST_CASE("rescaled windows") {
  const Field f = y_plus();
  const RescaledWindow w = rescale(f, f.domain(), zero_point(2), 0.5);
  CHECK(w.normalization == doctest::Approx(0.5 * std::sqrt(pi / 2)).epsilon(1e-12));
  for (double x : {-0.7, 0.0, 0.4})
    for (double y : {0.0, 0.3, 0.9}) {
      const Point q = make_point({x, y});
      CHECK(std::abs(eval(w.window, q) - y / std::sqrt(pi / 2)) <= 1e-6);
    }
  CHECK(eval(w.window, zero_point(2)) == 0.0);

  const Field g = re_z2();
  const RescaledWindow a = rescale(g, g.domain(), zero_point(2), 0.1);
  const RescaledWindow b = rescale(g, g.domain(), zero_point(2), 0.7);
  for (double x : {-0.5, 0.2, 0.9})
    CHECK(eval(a.window, make_point({x, 0.3})) == doctest::Approx(eval(b.window, make_point({x, 0.3}))));

  CHECK_THROWS_AS(rescale(f, Domain::whole_space(2), make_point({0.0, -1.0}), 0.5), DegenerateError);
  CHECK_THROWS_AS(rescale(f, f.domain(), zero_point(2), 0.0), InvalidScale);
}

TEST_CASE("windows have unit sphere norm and vanish at the center") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> ux(-0.5, 0.5), uy(0.0, 0.5), ur(0.01, 0.5);
  const Field f = AnalyticField::harmonic_polynomial(2, 3, {0.3, 1.0}, upper);
  for (int i = 0; i < 20; ++i) {
    const Point p = make_point({ux(rng), uy(rng)});
    const RescaledWindow w = rescale(f, upper, p, ur(rng));
    CHECK(shell_integrals(w.window, w.window.domain(), zero_point(2), 1.0).H == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(eval(w.window, zero_point(2))) <= 1e-12);
  }
}

TEST_CASE("symmetry defects of model fields") {
  const Field f = y_plus();
  CHECK(symmetry_defect(rescale(f, f.domain(), zero_point(2), 0.4), 1) <= 1e-6);
  const Field g = re_z2();
  const RescaledWindow w = rescale(g, g.domain(), zero_point(2), 0.3);
  CHECK(symmetry_defect(w, 0) <= 1e-6);
  CHECK(symmetry_defect(w, 1) > 0.05);
  CHECK(symmetry_defect(w, 1) == doctest::Approx(0.5).epsilon(1e-6));
  const Field v = wedge();
  const SymmetryReport rep = symmetry_report(rescale(v, v.domain(), zero_point(2), 0.2));
  CHECK(rep.defects[0] <= 1e-6);
  CHECK(rep.exponent == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(rep.defects[1] == doctest::Approx(0.0865).epsilon(1e-2));
  CHECK_THROWS_AS(symmetry_defect(w, 3), DomainError);
}

TEST_CASE("defects are nondecreasing in k") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ux(-0.5, 0.5), uy(0.0, 0.5), ur(0.02, 0.4);
  const Field f = AnalyticField::harmonic_polynomial(2, 3, {0.3, 1.0}, upper);
  for (int i = 0; i < 20; ++i) {
    const SymmetryReport rep = symmetry_report(rescale(f, upper, make_point({ux(rng), uy(rng)}), ur(rng)));
    for (std::size_t k = 1; k < rep.defects.size(); ++k)
      CHECK(rep.defects[k] >= rep.defects[k - 1]);
    CHECK(rep.defects.back() >= 1.0);
  }
}

TEST_CASE("quantitative symmetry") {
  const Field f = y_plus();
  CHECK(is_quant_symmetric(f, f.domain(), make_point({0.3, 0.0}), 0.3, 1, 0.01));
  const Field g = two_xy();
  CHECK_FALSE(is_quant_symmetric(g, upper, zero_point(2), 0.3, 1, 0.01));
  CHECK(is_quant_symmetric(g, upper, zero_point(2), 0.3, 0, 0.01));
  const SymmetryCheck c = check_quant_symmetry(f, Domain::whole_space(2), make_point({0.0, -1.0}), 0.5, 1, 0.01);
  CHECK(c.degenerate);
  CHECK(c.symmetric);
}

TEST_CASE("strata membership") {
  const Field g = two_xy();
  CHECK(strata_membership(g, upper, zero_point(2), 0, 0.01, std::ldexp(1.0, -6), 0.25));
  const Field f = y_plus();
  for (const Point &p : {make_point({0.0, 0.0}), make_point({0.2, 0.1}), make_point({-0.4, 0.0})})
    CHECK_FALSE(strata_membership(f, f.domain(), p, 0, 0.01, std::ldexp(1.0, -6), 0.25));
  const Field v = wedge();
  CHECK(strata_membership(v, v.domain(), zero_point(2), 0, 0.01, std::ldexp(1.0, -6), 0.25));
  CHECK_FALSE(strata_membership(v, v.domain(), make_point({0.3, 0.0}), 0, 0.01, std::ldexp(1.0, -6), 0.25));

  const auto ladder = scale_ladder(std::ldexp(1.0, -6), 0.25);
  REQUIRE(ladder.size() == 5);
  CHECK(ladder.back() == std::ldexp(1.0, -6));
  CHECK(scale_ladder(1e-9, 1.0).size() == 12);
  CHECK_THROWS_AS(scale_ladder(1.0, 0.5), InvalidScale);
}

TEST_CASE("strata scans") {
  const Field f = y_plus();
  const Balld region(zero_point(2), 0.25);
  const double step = 1.0 / 64;
  CHECK(strata_scan(f, f.domain(), region, step, 0, 0.01, step).members.empty());

  const Field g = two_xy();
  const StrataScan scan = strata_scan(g, upper, region, step, 0, 0.01, step);
  REQUIRE(!scan.members.empty());
  bool has_origin = false;
  for (const auto &x : scan.members) {
    CHECK(x.norm() <= 6 * step);
    has_origin = has_origin || x.norm() < 1e-12;
  }
  CHECK(has_origin);

  const Field cubic =
      AnalyticField::harmonic_polynomial(2, 3, {1.0, 0.0}, Domain::box(make_point({-1.0, -1.0}), make_point({1.0, 1.0})));
  const StrataScan c3 = strata_scan(cubic, cubic.domain(), region, step, 0, 0.01, std::ldexp(1.0, -10));
  REQUIRE(!c3.members.empty());
  for (const auto &x : c3.members)
    CHECK(x.norm() <= 6 * step);

  std::ostringstream os;
  write_scan_csv(os, scan, 0.01);
  CHECK(os.str().rfind("x,y,margin,member\n", 0) == 0);
}

TEST_CASE("strata containment") {
  const Field g = AnalyticField::harmonic_polynomial(2, 3, {0.2, 1.0}, upper);
  const Balld region(make_point({0.0, 0.1}), 0.2);
  const double step = 0.025;
  auto members = [&](int k, double eps, double r) {
    return strata_scan(g, upper, region, step, k, eps, r, 0.2).members;
  };
  auto subset = [](const std::vector<Point> &a, const std::vector<Point> &b) {
    for (const auto &x : a)
      if (std::none_of(b.begin(), b.end(), [&](const Point &y) { return (x - y).norm() < 1e-12; }))
        return false;
    return true;
  };
  const auto base = members(0, 0.02, 0.0125);
  CHECK(!base.empty());
  CHECK(subset(base, members(0, 0.01, 0.0125)));
  CHECK(subset(base, members(0, 0.02, 0.05)));
  CHECK(subset(members(0, 0.01, 0.0125), members(1, 0.01, 0.0125)));
}

TEST_CASE("quantitative rigidity: small frequency drop gives small homogeneity defect") {
  const Field f = AnalyticField::harmonic_polynomial(2, 3, {0.3, 1.0}, upper);
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> ux(-0.4, 0.4), uy(0.0, 0.3), ur(0.05, 0.3);
  std::vector<double> drops, defects;
  for (int i = 0; i < 50; ++i) {
    const Point p = make_point({ux(rng), i % 2 ? 0.0 : uy(rng)});
    const double r = ur(rng);
    drops.push_back(max_frequency(f, upper, p, 2 * r, 8) - frequency(f, upper, p, r / 4));
    defects.push_back(symmetry_report(rescale(f, upper, p, r)).homogeneous_part);
  }
  const double rho = spearman(drops, defects);
  MESSAGE("rank correlation between frequency drop and defect_0: " << rho);
  CHECK(rho >= 0.6);
  std::vector<std::size_t> order(drops.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return drops[a] < drops[b]; });
  double low = 0.0, high = 0.0;
  for (std::size_t i = 0; i < 12; ++i) {
    low = std::max(low, defects[order[i]]);
    high = std::max(high, defects[order[order.size() - 1 - i]]);
  }
  CHECK(low < high);
}

TEST_CASE("frequency coefficient is bounded on nearly homogeneous windows") {
  const Field f = AnalyticField::harmonic_polynomial(2, 3, {0.3, 1.0}, upper);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> ux(-0.4, 0.4), uy(0.0, 0.2), ur(0.02, 0.3);
  double bound = 0.0;
  std::vector<std::pair<double, double>> flagged;
  for (int i = 0; i < 40; ++i) {
    const Point p = make_point({ux(rng), uy(rng)});
    const double r = ur(rng);
    bound = std::max(bound, max_frequency(f, upper, p, r, 4));
    const SymmetryReport rep = symmetry_report(rescale(f, upper, p, r));
    if (rep.defects[0] < 0.01)
      flagged.emplace_back(rep.exponent, rep.defects[0]);
  }
  CHECK(!flagged.empty());
  for (auto [lambda, d] : flagged)
    CHECK(std::abs(lambda) <= 2.0 * bound);
}

TEST_CASE("grid-solved wedge keeps its vertex in the stratum") {
  const Domain d = Domain::wedge(2 * pi / 3);
  const Field exact = wedge();
  const Field g(solve_dirichlet(d, [&](const Point &x) { return eval(exact, x); }, 128));
  CHECK(strata_membership(g, d, zero_point(2), 0, 0.01, 0.05, 0.4));
  const SymmetryReport rep = symmetry_report(rescale(g, d, zero_point(2), 0.2));
  CHECK(rep.exponent == doctest::Approx(1.5).epsilon(0.02));
  CHECK(rep.defects[0] <= 1e-3);
}
