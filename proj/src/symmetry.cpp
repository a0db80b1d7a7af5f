#include "almgren/symmetry.hpp"

#include "almgren/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace almgren {

RescaledWindow rescale(const Field &field, const Domain &domain, const Point &p, double r, const Quadrature &quad) {
  if (!(r > 0.0))
    throw InvalidScale("rescale: radius must be positive");
  if (!in_closure(domain, p))
    throw DomainError("rescale: center outside the domain closure");
  const ShellIntegrals s = shell_integrals(field, domain, p, r, quad);
  if (s.degenerate())
    throw DegenerateError("rescale: vanishing normalization");
  const double norm = std::sqrt(s.H / std::pow(r, domain.dim() - 1));
  const double up = eval(field, p);
  return {field.transformed(1.0 / norm, r, p, -up / norm), p, r, norm};
}

namespace {

struct Direction {
  Vector dir;
  double weight;
};

std::vector<Direction> window_directions(const Domain &domain, int count) {
  std::vector<Direction> out;
  const Point origin = zero_point(domain.dim());
  if (domain.dim() == 3) {
    for (const auto &n : sphere_samples(Balld(origin, 1.0), count))
      out.push_back({n.point, n.weight});
    return out;
  }
  std::vector<double> cuts{0.0, 2 * pi};
  for (auto [a, b] : arcs_inside(domain, origin, 1.0)) {
    cuts.push_back(a);
    cuts.push_back(b);
  }
  for (const auto &v : singular_points(domain, Balld(origin, 1.0)))
    if (v.norm() > 1e-12) {
      double t = std::atan2(v[1], v[0]);
      cuts.push_back(t < 0.0 ? t + 2 * pi : t);
    }
  std::sort(cuts.begin(), cuts.end());
  constexpr int order = 8;
  const GaussRule &rule = gauss_legendre(order);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (b - a < 1e-14)
      continue;
    const int panels = std::max(1, static_cast<int>(std::ceil(count * (b - a) / (2 * pi * order))));
    const double h = (b - a) / panels;
    for (int k = 0; k < panels; ++k)
      for (int q = 0; q < order; ++q) {
        const double t = a + (k + 0.5 + 0.5 * rule.nodes[q]) * h;
        out.push_back({make_point({std::cos(t), std::sin(t)}), 0.5 * h * rule.weights[q]});
      }
  }
  return out;
}

} // namespace

SymmetryReport symmetry_report(const RescaledWindow &window, const WindowQuadrature &quad) {
  const Field &w = window.window;
  const Domain &dom = w.domain();
  const int n = dom.dim();
  const Point origin = zero_point(n);
  const int count = quad.directions > 0 ? quad.directions : (n == 2 ? 128 : 512);

  SymmetryReport rep;
  const ShellIntegrals unit = shell_integrals(w, dom, origin, 1.0);
  rep.exponent = unit.degenerate() ? 0.0 : unit.lambda();
  const double a = rep.exponent;

  struct Sample {
    double value;
    double weight;
    double t;
    std::size_t dir;
  };
  std::vector<Sample> samples;
  std::vector<double> trace_value; // T u at the exit point, scaled by rho_e^-a
  Matrix G = Matrix::Zero(n, n);
  double c2 = 0.0;
  const auto dirs = window_directions(dom, count);
  trace_value.assign(dirs.size(), 0.0);
  for (std::size_t d = 0; d < dirs.size(); ++d) {
    const Vector &e = dirs[d].dir;
    const double rho = exit_distance<double>(dom, std::nullopt, origin, e, 1.0).first;
    if (rho < 1e-12)
      continue;
    trace_value[d] = eval(w, Point(rho * e)) * std::pow(rho, -a);
    c2 += dirs[d].weight * trace_value[d] * trace_value[d];
    for (const auto &rn : radial_nodes(0.0, rho, quad.radial_panels)) {
      const Point x = rn.rho * e;
      const double wt = dirs[d].weight * rn.weight * std::pow(rn.rho, n - 1);
      const Vector g = gradient(w, x).value;
      G += wt * g * g.transpose();
      samples.push_back({eval(w, x), wt, rn.rho, d});
    }
  }
  const double c = c2 > 1e-28 ? std::sqrt(c2) : 0.0;
  double hom = 0.0;
  for (const auto &s : samples) {
    const double P = c > 0.0 ? std::pow(s.t, a) * trace_value[s.dir] / c : 0.0;
    hom += s.weight * (s.value - P) * (s.value - P);
  }
  rep.homogeneous_part = hom;

  Eigen::SelfAdjointEigenSolver<Matrix> eig(G);
  const double trace = G.trace();
  rep.covariance_eigenvalues = trace > 0.0 ? Vector(eig.eigenvalues().cwiseMax(0.0) / trace) : Vector(Vector::Zero(n));
  rep.covariance_directions = eig.eigenvectors();
  rep.defects.assign(n + 1, hom);
  double partial = 0.0;
  for (int k = 1; k <= n; ++k) {
    partial += k == n && trace > 0.0 ? 1.0 - partial : rep.covariance_eigenvalues[k - 1];
    rep.defects[k] = hom + (k == n ? 1.0 : partial);
  }
  return rep;
}

double symmetry_defect(const RescaledWindow &window, int k, const WindowQuadrature &quad) {
  const int n = window.window.dim();
  if (k < 0 || k > n)
    throw DomainError("symmetry_defect: k must lie in [0, n]");
  return symmetry_report(window, quad).defects[k];
}

SymmetryCheck check_quant_symmetry(const Field &field, const Domain &domain, const Point &p, double r, int k,
                                   double epsilon, const WindowQuadrature &quad) {
  try {
    const double d = symmetry_defect(rescale(field, domain, p, r), k, quad);
    return {d < epsilon, false, d};
  } catch (const DegenerateError &) {
    return {true, true, 0.0};
  }
}

bool is_quant_symmetric(const Field &field, const Domain &domain, const Point &p, double r, int k, double epsilon,
                        const WindowQuadrature &quad) {
  return check_quant_symmetry(field, domain, p, r, k, epsilon, quad).symmetric;
}

std::vector<double> scale_ladder(double r, double max_scale) {
  if (!(r > 0.0) || !(max_scale > 0.0))
    throw InvalidScale("scale_ladder: scales must be positive");
  if (r > max_scale * (1.0 + 1e-12))
    throw InvalidScale("scale_ladder: r exceeds max_scale");
  std::vector<double> out;
  for (int j = 0; j < 12; ++j) {
    const double s = std::ldexp(max_scale, -j);
    if (s < r * (1.0 - 1e-9))
      break;
    out.push_back(s);
  }
  return out;
}

double strata_margin(const Field &field, const Domain &domain, const Point &p, int k, double r, double max_scale,
                     const WindowQuadrature &quad) {
  double margin = std::numeric_limits<double>::infinity();
  for (double s : scale_ladder(r, max_scale)) {
    const SymmetryCheck c = check_quant_symmetry(field, domain, p, s, k + 1, 0.0, quad);
    margin = std::min(margin, c.defect);
    if (margin == 0.0)
      break;
  }
  return margin;
}

bool strata_membership(const Field &field, const Domain &domain, const Point &p, int k, double epsilon, double r,
                       double max_scale, const WindowQuadrature &quad) {
  for (double s : scale_ladder(r, max_scale))
    if (check_quant_symmetry(field, domain, p, s, k + 1, epsilon, quad).symmetric)
      return false;
  return true;
}

std::vector<Point> lattice_points(const Domain &domain, const Balld &region, double step) {
  if (!(step > 0.0))
    throw InvalidScale("lattice_points: step must be positive");
  const int n = domain.dim();
  const int m = static_cast<int>(std::floor(region.radius / step + 1e-9));
  std::vector<Point> out;
  std::array<int, 3> idx{-m, -m, n == 3 ? -m : 0};
  const int zmax = n == 3 ? m : 0;
  for (idx[2] = n == 3 ? -m : 0; idx[2] <= zmax; ++idx[2])
    for (idx[1] = -m; idx[1] <= m; ++idx[1])
      for (idx[0] = -m; idx[0] <= m; ++idx[0]) {
        Point x = region.center;
        for (int a = 0; a < n; ++a)
          x[a] += step * idx[a];
        if ((x - region.center).norm() <= region.radius * (1.0 + 1e-12) && in_closure(domain, x))
          out.push_back(x);
      }
  return out;
}

StrataScan strata_scan(const Field &field, const Domain &domain, const Balld &region, double step, int k,
                       double epsilon, double r, double max_scale, const WindowQuadrature &quad) {
  const double top = max_scale > 0.0 ? max_scale : region.radius;
  StrataScan scan;
  const auto pts = lattice_points(domain, region, step);
  std::vector<double> margins(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { margins[i] = strata_margin(field, domain, pts[i], k, r, top, quad); });
  for (std::size_t i = 0; i < pts.size(); ++i) {
    scan.lattice.push_back({pts[i], margins[i]});
    if (margins[i] >= epsilon)
      scan.members.push_back(pts[i]);
  }
  return scan;
}

void write_scan_csv(std::ostream &os, const StrataScan &scan, double epsilon) {
  if (scan.lattice.empty()) {
    os << "x,y,margin,member\n";
    return;
  }
  const int n = static_cast<int>(scan.lattice.front().x.size());
  os << "x,y" << (n == 3 ? ",z" : "") << ",margin,member\n";
  char buf[64];
  for (const auto &sp : scan.lattice) {
    for (int i = 0; i < n; ++i) {
      std::snprintf(buf, sizeof buf, "%.12g,", sp.x[i]);
      os << buf;
    }
    std::snprintf(buf, sizeof buf, "%.12g,%d\n", sp.margin, sp.margin >= epsilon ? 1 : 0);
    os << buf;
  }
}

} // namespace almgren
