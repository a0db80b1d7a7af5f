#include "almgren/frequency.hpp"

#include "almgren/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

namespace almgren {

int Quadrature::nodes(int dim) const { return sphere_nodes > 0 ? sphere_nodes : default_sphere_nodes(dim); }

bool ShellIntegrals::degenerate() const { return !(H > 1e-14 * scale) || H < 1e-300; }

ShellIntegrals shell_integrals(const Field &field, const Domain &domain, const Point &p, double r,
                               const Quadrature &quad) {
  if (!(r > 0.0))
    throw InvalidScale("shell_integrals: radius must be positive");
  const double up = eval(field, p);
  ShellIntegrals s;
  for (const auto &n : shell_nodes(domain, p, r, quad.nodes(domain.dim()))) {
    const double u = eval(field, n.x);
    const double a = u - up;
    s.H += n.weight * a * a;
    s.cross += n.weight * a * r * gradient(field, n.x).value.dot(n.dir);
    s.scale += n.weight * (u * u + up * up);
  }
  return s;
}

namespace {

// Sorted cut points for a radial sweep from 0 to max(radii).
std::vector<double> sweep_points(const Domain &domain, const Point &p, const std::vector<double> &radii) {
  const double r_max = *std::max_element(radii.begin(), radii.end());
  std::vector<double> cuts = radial_breaks(domain, p, r_max);
  cuts.insert(cuts.end(), radii.begin(), radii.end());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

double shell_energy(const Field &field, const Point &p, double rho, int count) {
  double total = 0.0;
  for (const auto &n : shell_nodes(field.domain(), p, rho, count))
    total += n.weight * gradient(field, n.x).value.squaredNorm();
  return total;
}

void check_radii(const std::vector<double> &radii) {
  if (radii.empty())
    throw InvalidScale("empty radius list");
  for (double r : radii)
    if (!(r > 0.0) || !std::isfinite(r))
      throw InvalidScale("radii must be positive and finite");
}

} // namespace

std::vector<double> dirichlet_energy(const Field &field, const Point &p, const std::vector<double> &radii,
                                     const Quadrature &quad) {
  check_radii(radii);
  const int count = quad.nodes(field.dim());
  std::map<double, double> at;
  double acc = 0.0, prev = 0.0;
  for (double cut : sweep_points(field.domain(), p, radii)) {
    for (const auto &rn : radial_nodes(prev, cut, quad.radial_panels))
      acc += rn.weight * shell_energy(field, p, rn.rho, count);
    at[cut] = acc;
    prev = cut;
  }
  std::vector<double> out;
  out.reserve(radii.size());
  for (double r : radii)
    out.push_back(at.at(r));
  return out;
}

FrequencyProfile frequency_profile(const Field &field, const Domain &domain, const Point &p,
                                   const std::vector<double> &radii, const Quadrature &quad) {
  check_radii(radii);
  if (!in_closure(domain, p))
    throw DomainError("frequency_profile: center outside the domain closure");
  std::vector<double> sorted = radii;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  const std::vector<double> D = dirichlet_energy(field, p, sorted, quad);
  FrequencyProfile profile;
  profile.center = p;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double r = sorted[i];
    const ShellIntegrals s = shell_integrals(field, domain, p, r, quad);
    if (s.degenerate()) {
      profile.degenerate.push_back(r);
      continue;
    }
    profile.records.push_back({r, s.H, D[i], r * D[i] / s.H, s.lambda()});
  }
  return profile;
}

double frequency(const Field &field, const Domain &domain, const Point &p, double r, const Quadrature &quad) {
  const FrequencyProfile prof = frequency_profile(field, domain, p, {r}, quad);
  if (prof.records.empty())
    throw DegenerateError("frequency: vanishing height");
  return prof.records.front().N;
}

double frequency_coefficient(const Field &field, const Domain &domain, const Point &p, double r,
                             const Quadrature &quad) {
  const ShellIntegrals s = shell_integrals(field, domain, p, r, quad);
  if (s.degenerate())
    throw DegenerateError("frequency_coefficient: vanishing height");
  return s.lambda();
}

double max_frequency(const Field &field, const Domain &domain, const Point &p, double r, int ladder,
                     const Quadrature &quad) {
  if (ladder < 1)
    throw InvalidScale("max_frequency: ladder must have at least one rung");
  std::vector<double> radii;
  for (int j = 0; j < ladder; ++j)
    radii.push_back(std::ldexp(r, -j));
  const FrequencyProfile prof = frequency_profile(field, domain, p, radii, quad);
  if (prof.records.empty())
    throw DegenerateError("max_frequency: every radius is degenerate");
  double best = prof.records.front().N;
  for (const auto &rec : prof.records)
    best = std::max(best, rec.N);
  return best;
}

HomogeneityDefect homogeneity_defect(const Field &field, const Domain &domain, const Point &p, double r_in,
                                     double r_out, const Quadrature &quad) {
  if (!(r_in > 0.0 && r_out > r_in))
    throw InvalidScale("homogeneity_defect: need 0 < r_in < r_out");
  const int n = domain.dim();
  const int count = quad.nodes(n);
  const double up = eval(field, p);
  std::vector<double> cuts = radial_breaks(domain, p, r_out);
  cuts.erase(std::remove_if(cuts.begin(), cuts.end(), [&](double c) { return c <= r_in; }), cuts.end());
  cuts.push_back(r_out);
  HomogeneityDefect out;
  double prev = r_in;
  std::vector<double> a, b, w;
  for (double cut : cuts) {
    for (const auto &rn : radial_nodes(prev, cut, quad.radial_panels)) {
      a.clear();
      b.clear();
      w.clear();
      double H = 0.0, cross = 0.0, scale = 0.0;
      for (const auto &node : shell_nodes(domain, p, rn.rho, count)) {
        const double u = eval(field, node.x);
        a.push_back(u - up);
        b.push_back(rn.rho * gradient(field, node.x).value.dot(node.dir));
        w.push_back(node.weight);
        H += node.weight * a.back() * a.back();
        cross += node.weight * a.back() * b.back();
        scale += node.weight * (u * u + up * up);
      }
      if (!(H > 1e-14 * scale) || H < 1e-300) {
        ++out.skipped_shells;
        continue;
      }
      const double lambda = cross / H;
      double shell = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = b[i] - lambda * a[i];
        shell += w[i] * d * d;
      }
      out.value += rn.weight * shell / std::pow(rn.rho, n + 2);
    }
    prev = cut;
  }
  return out;
}

namespace {

// Integral of g over the disk of radius rho about the origin intersected
// with a planar domain.
template <typename G>
double integrate_planar_disk(const Domain &planar, double rho, int count, int panels, G &&g) {
  double total = 0.0, prev = 0.0;
  std::vector<double> cuts = radial_breaks(planar, zero_point(2), rho);
  cuts.push_back(rho);
  for (double cut : cuts) {
    for (const auto &rn : radial_nodes(prev, cut, panels))
      for (const auto &node : shell_nodes(planar, zero_point(2), rn.rho, count))
        total += rn.weight * node.weight * g(node.x);
    prev = cut;
  }
  return total;
}

} // namespace

double boundary_flux(const Field &field, const Domain &domain, const Point &q, double r, const Quadrature &quad) {
  if (!(r > 0.0))
    throw InvalidScale("boundary_flux: radius must be positive");
  const int n = domain.dim();
  const auto faces = domain.faces();
  const GaussRule &rule = gauss_legendre(8);
  double total = 0.0;
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const HalfSpaced &face = faces[f];
    const double dist = face.signed_distance(q);
    if (std::abs(dist) >= r)
      continue;
    const Point foot = q - dist * face.normal;
    const double rho = std::sqrt(r * r - dist * dist);
    const Vector inward = -face.normal;
    auto flux_at = [&](const Point &x) { return gradient(field, x).value.dot(inward); };
    if (n == 2) {
      Vector t(2);
      t << -face.normal[1], face.normal[0];
      double lo = -rho, hi = rho;
      for (std::size_t g = 0; g < faces.size() && lo < hi; ++g) {
        if (g == f)
          continue;
        const double rate = faces[g].normal.dot(t);
        const double room = faces[g].offset - faces[g].normal.dot(foot);
        if (std::abs(rate) < 1e-14) {
          if (room < -boundary_tol)
            hi = lo;
        } else if (rate > 0.0) {
          hi = std::min(hi, room / rate);
        } else {
          lo = std::max(lo, room / rate);
        }
      }
      if (!(hi > lo))
        continue;
      const int panels = std::max(1, quad.nodes(2) / 16);
      const double h = (hi - lo) / panels;
      for (int k = 0; k < panels; ++k)
        for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
          const double s = lo + (k + 0.5 + 0.5 * rule.nodes[j]) * h;
          total += 0.5 * h * rule.weights[j] * flux_at(Point(foot + s * t));
        }
      continue;
    }
    // 3D: integrate over the face plane in an orthonormal frame at the foot.
    Eigen::Vector3d nrm = face.normal;
    Eigen::Vector3d e1 = nrm.unitOrthogonal();
    Eigen::Vector3d e2 = nrm.cross(e1);
    std::vector<HalfSpaced> halves;
    bool empty = false;
    for (std::size_t g = 0; g < faces.size(); ++g) {
      if (g == f)
        continue;
      Vector n2 = make_point({faces[g].normal.dot(Vector(e1)), faces[g].normal.dot(Vector(e2))});
      const double room = faces[g].offset - faces[g].normal.dot(foot);
      if (n2.norm() < 1e-12) {
        empty = empty || room < -boundary_tol;
        continue;
      }
      halves.push_back({n2, room});
    }
    if (empty)
      continue;
    const Domain planar(2, halves);
    total += integrate_planar_disk(planar, rho, quad.nodes(2), quad.radial_panels, [&](const Point &ab) {
      return flux_at(Point(foot + ab[0] * Vector(e1) + ab[1] * Vector(e2)));
    });
  }
  return total;
}

DoublingReport doubling_check(const Field &field, const Domain &domain, const Point &Q, double s, double S,
                              double slack, const Quadrature &quad) {
  if (!(s > 0.0 && S > s))
    throw InvalidScale("doubling_check: need 0 < s < S");
  const FrequencyProfile prof = frequency_profile(field, domain, Q, {s, S}, quad);
  if (prof.records.size() != 2)
    throw DegenerateError("doubling_check: vanishing height");
  const auto &small = prof.records[0];
  const auto &large = prof.records[1];
  DoublingReport rep{Q, s, S, large.H / small.H, 0.0, slack, false};
  rep.bound = std::pow(S / s, (domain.dim() - 1) + 2.0 * large.N);
  rep.satisfied = rep.lhs <= rep.bound * (1.0 + slack);
  return rep;
}

void write_profile_csv(std::ostream &os, const FrequencyProfile &profile) {
  const int n = static_cast<int>(profile.center.size());
  os << "p_x,p_y" << (n == 3 ? ",p_z" : "") << ",r,H,D,N,lambda\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::string(buf);
  };
  for (const auto &rec : profile.records) {
    for (int i = 0; i < n; ++i)
      os << num(profile.center[i]) << ',';
    os << num(rec.r) << ',' << num(rec.H) << ',' << num(rec.D) << ',' << num(rec.N) << ',' << num(rec.lambda)
       << '\n';
  }
}

} // namespace almgren
