#include "almgren/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace almgren {

int default_sphere_nodes(int dim) { return dim == 2 ? 720 : 4096; }

std::vector<ShellNode> shell_nodes(const Domain &domain, const Point &p, double r, int count) {
  if (!(r > 0.0))
    throw InvalidScale("shell_nodes: radius must be positive");
  std::vector<ShellNode> out;
  if (domain.dim() == 3) {
    for (const auto &n : sphere_samples(Balld(p, r), count))
      if (in_closure(domain, n.point))
        out.push_back({n.point, Vector((n.point - p) / r), n.weight});
    return out;
  }
  constexpr int order = 8;
  const GaussRule &rule = gauss_legendre(order);
  for (auto [a, b] : arcs_inside(domain, p, r)) {
    const int panels = std::max(1, static_cast<int>(std::ceil(count * (b - a) / (2 * pi * order))));
    const double h = (b - a) / panels;
    for (int k = 0; k < panels; ++k) {
      const double mid = a + (k + 0.5) * h;
      for (int q = 0; q < order; ++q) {
        const double t = mid + 0.5 * h * rule.nodes[q];
        Vector dir(2);
        dir << std::cos(t), std::sin(t);
        out.push_back({Point(p + r * dir), dir, 0.5 * h * rule.weights[q] * r});
      }
    }
  }
  return out;
}

std::vector<RadialNode> radial_nodes(double a, double b, int panels, int order) {
  std::vector<RadialNode> out;
  if (!(b > a))
    return out;
  const GaussRule &rule = gauss_legendre(order);
  const double h = 1.0 / panels;
  for (int k = 0; k < panels; ++k)
    for (int q = 0; q < order; ++q) {
      const double s = (k + 0.5 + 0.5 * rule.nodes[q]) * h;
      const double w = 0.5 * h * rule.weights[q];
      // rho = a + (b - a)(3 s^2 - 2 s^3)
      out.push_back({a + (b - a) * s * s * (3.0 - 2.0 * s), w * (b - a) * 6.0 * s * (1.0 - s)});
    }
  return out;
}

std::vector<double> radial_breaks(const Domain &domain, const Point &p, double r_max) {
  std::vector<double> out;
  auto keep = [&](double d) {
    if (d > 1e-12 && d < r_max * (1.0 - 1e-12))
      out.push_back(d);
  };
  for (const auto &h : domain.faces())
    keep(std::abs(h.signed_distance(p)));
  for (const auto &v : singular_points(domain, Balld(p, r_max), 0))
    keep((v - p).norm());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(), [](double x, double y) { return y - x < 1e-12; }), out.end());
  return out;
}

} // namespace almgren
