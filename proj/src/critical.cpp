#include "almgren/critical.hpp"
#include "almgren/covering.hpp"
#include "almgren/optim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace almgren {

const char *kind_name(CriticalKind kind) {
  switch (kind) {
  case CriticalKind::interior:
    return "interior";
  case CriticalKind::boundary_flat:
    return "boundary_flat";
  case CriticalKind::boundary_singular:
    return "boundary_singular";
  }
  return "?";
}

namespace {

Matrix fd_hessian(const Field &field, const Point &x) {
  const int n = field.dim();
  Matrix H(n, n);
  const double d = 1e-5 * std::max(1.0, x.norm());
  for (int j = 0; j < n; ++j) {
    Point a = x, b = x;
    a[j] += d;
    b[j] -= d;
    const Vector ga = gradient(field, a).value, gb = gradient(field, b).value;
    H.col(j) = (ga - gb) / (2.0 * d);
  }
  return 0.5 * (H + H.transpose());
}

Point refine_interior(const Field &field, const Domain &domain, Point x, double step, double tol, int iterations) {
  for (int it = 0; it < iterations; ++it) {
    const Vector g = gradient(field, x).value;
    if (g.norm() <= tol)
      return x;
    const Matrix H = fd_hessian(field, x);
    Eigen::FullPivLU<Matrix> lu(H);
    if (lu.rank() < field.dim() || !std::isfinite(H.norm()))
      break;
    Vector dx = lu.solve(g);
    if (dx.norm() > step)
      dx *= step / dx.norm();
    x -= dx;
    if (contains(domain, x) != Membership::interior)
      return x;
  }
  if (gradient(field, x).value.norm() <= tol)
    return x;
  auto f = [&](const Eigen::VectorXd &y) {
    const Point p = y;
    if (contains(domain, p) == Membership::exterior)
      return 1e300;
    return gradient(field, p).value.squaredNorm();
  };
  return nelder_mead(f, x, 0.25 * step, 1e-30, 4000).x;
}

double gap_to_other_faces(const Domain &domain, const Point &Q) {
  double gap = std::numeric_limits<double>::infinity();
  for (const auto &h : domain.faces()) {
    const double sd = h.signed_distance(Q);
    if (std::abs(sd) > boundary_tol)
      gap = std::min(gap, -sd);
  }
  return gap;
}

// Orthonormal basis of the hyperplane normal to n.
Matrix tangent_basis(const Vector &n) {
  const int dim = static_cast<int>(n.size());
  const Matrix normal = n;
  Eigen::HouseholderQR<Matrix> qr(normal);
  const Matrix Q = qr.householderQ() * Matrix::Identity(dim, dim);
  return Q.rightCols(dim - 1);
}

void push_merged(std::vector<CriticalPoint> &out, const CriticalPoint &c, double merge) {
  for (auto &o : out)
    if (o.kind == c.kind && (o.location - c.location).norm() <= merge) {
      if (c.gradient_norm + std::abs(c.normal_derivative) < o.gradient_norm + std::abs(o.normal_derivative))
        o = c;
      return;
    }
  out.push_back(c);
}

} // namespace

double normal_derivative(const Field &field, const Domain &domain, const Point &Q, double h0, int levels) {
  const auto eta = inward_normal(domain, Q);
  if (!eta)
    throw ValidationError("normal_derivative: not a flat boundary point");
  h0 = std::min(h0, 0.25 * gap_to_other_faces(domain, Q));
  if (!(h0 > 0.0) || levels < 1)
    throw InvalidScale("normal_derivative: step must be positive");
  const double u0 = eval(field, Q);
  std::vector<std::vector<double>> R(levels);
  double h = h0;
  for (int i = 0; i < levels; ++i, h *= 0.5) {
    R[i].resize(i + 1);
    R[i][0] = (eval(field, Point(Q + h * *eta)) - u0) / h;
    double f = 1.0;
    for (int j = 1; j <= i; ++j) {
      f *= 2.0;
      R[i][j] = (f * R[i][j - 1] - R[i - 1][j - 1]) / (f - 1.0);
    }
  }
  return R[levels - 1][levels - 1];
}

std::vector<CriticalPoint> critical_points(const Field &field, const Domain &domain, const Balld &region, double step,
                                           double tol, const CriticalOptions &options) {
  if (!(step > 0.0))
    throw InvalidScale("critical_points: step must be positive");
  const int n = domain.dim();
  const double merge = std::max(0.25 * step, 1e-9);
  std::vector<CriticalPoint> out;

  // Interior sweep.
  std::vector<Point> seeds;
  for (const auto &x : lattice_points(domain, region, step)) {
    if (contains(domain, x) != Membership::interior)
      continue;
    const double g = gradient(field, x).value.norm();
    bool minimum = true;
    for (int d = 0; d < n && minimum; ++d)
      for (double s : {-step, step}) {
        Point y = x;
        y[d] += s;
        if (contains(domain, y) == Membership::exterior)
          continue;
        if (gradient(field, y).value.norm() < g) {
          minimum = false;
          break;
        }
      }
    if (minimum)
      seeds.push_back(x);
  }
  std::vector<CriticalPoint> found(seeds.size());
  std::vector<char> ok(seeds.size(), 0);
  parallel_for(seeds.size(), [&](std::size_t i) {
    const Point x = refine_interior(field, domain, seeds[i], step, tol, options.newton_iterations);
    const double g = gradient(field, x).value.norm();
    if (g <= tol && contains(domain, x) == Membership::interior && region.contains(x)) {
      found[i] = {x, CriticalKind::interior, g, 0.0};
      ok[i] = 1;
    }
  });
  for (std::size_t i = 0; i < seeds.size(); ++i)
    if (ok[i])
      push_merged(out, found[i], merge);

  // Flat boundary sweep, face by face.
  for (const auto &face : domain.faces()) {
    const double sd = face.signed_distance(region.center);
    if (std::abs(sd) > region.radius)
      continue;
    const Point base = region.center - sd * face.normal;
    const double rho = std::sqrt(region.radius * region.radius - sd * sd);
    const Matrix T = tangent_basis(face.normal);
    const int m = n - 1;
    auto at = [&](const Eigen::VectorXd &t) { return Point(base + T * t); };
    auto g = [&](const Eigen::VectorXd &t) {
      const Point Q = at(t);
      if (t.norm() > rho || !is_flat_boundary_point(domain, Q))
        return std::numeric_limits<double>::infinity();
      return std::abs(normal_derivative(field, domain, Q));
    };
    const int count = static_cast<int>(std::floor(rho / step));
    std::vector<Eigen::VectorXd> grid;
    if (m == 1) {
      for (int i = -count; i <= count; ++i)
        grid.push_back(Eigen::VectorXd::Constant(1, i * step));
    } else {
      for (int i = -count; i <= count; ++i)
        for (int j = -count; j <= count; ++j) {
          Eigen::VectorXd t(2);
          t << i * step, j * step;
          if (t.norm() <= rho)
            grid.push_back(t);
        }
    }
    std::vector<double> vals(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) { vals[i] = g(grid[i]); });
    std::vector<CriticalPoint> local(grid.size());
    std::vector<char> hit(grid.size(), 0);
    parallel_for(grid.size(), [&](std::size_t i) {
      if (!std::isfinite(vals[i]))
        return;
      for (std::size_t j = 0; j < grid.size(); ++j)
        if (j != i && (grid[j] - grid[i]).norm() <= step * 1.5 && vals[j] < vals[i])
          return;
      Eigen::VectorXd t = grid[i];
      if (m == 1) {
        const double c = t[0];
        t[0] = golden_section(
            [&](double s) {
              Eigen::VectorXd v = Eigen::VectorXd::Constant(1, s);
              const double y = g(v);
              return std::isfinite(y) ? y : 1e300;
            },
            c - step, c + step, 1e-14);
      } else {
        t = nelder_mead(
                [&](const Eigen::VectorXd &v) {
                  const double y = g(v);
                  return std::isfinite(y) ? y * y : 1e300;
                },
                t, 0.5 * step, 1e-30, 4000)
                .x;
      }
      const double gn = g(t);
      if (std::isfinite(gn) && gn <= tol) {
        const Point Q = at(t);
        local[i] = {Q, CriticalKind::boundary_flat, 0.0, normal_derivative(field, domain, Q)};
        hit[i] = 1;
      }
    });
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (hit[i])
        push_merged(out, local[i], merge);
  }

  for (const auto &x : singular_points(domain, region))
    out.push_back({x, CriticalKind::boundary_singular, 0.0, 0.0});

  if (options.estimate_N0)
    parallel_for(out.size(), [&](std::size_t i) {
      out[i].N0 = blowup_trace(field, domain, out[i].location, options.blowup_ratio, options.blowup_depth).N0;
    });
  return out;
}

BlowupTrace blowup_trace(const Field &field, const Domain &domain, const Point &Q, double ratio, int depth,
                         const Quadrature &quad, double monotone_tol) {
  if (!(ratio > 0.0 && ratio < 1.0) || depth < 1)
    throw InvalidScale("blowup_trace: ratio must lie in (0, 1) and depth be positive");
  if (!in_closure(domain, Q))
    throw DomainError("blowup_trace: Q outside the domain closure");
  std::vector<double> radii;
  for (int j = 0; j < depth; ++j)
    radii.push_back(std::pow(ratio, j));
  const FrequencyProfile prof = frequency_profile(field, domain, Q, radii, quad);

  BlowupTrace trace;
  trace.Q = Q;
  for (double r : radii) {
    auto it = std::find_if(prof.records.begin(), prof.records.end(), [r](const FrequencyRecord &rec) { return rec.r == r; });
    if (it == prof.records.end())
      break;
    trace.scales.push_back({it->r, it->H, it->D, it->N});
  }
  const auto &s = trace.scales;
  if (s.empty())
    throw DegenerateError("blowup_trace: degenerate at the first scale");

  for (std::size_t j = 1; j < s.size(); ++j) {
    const double rise = s[j].N - s[j - 1].N;
    trace.monotonicity_violation = std::max(trace.monotonicity_violation, rise);
  }
  trace.monotone = trace.monotonicity_violation <= monotone_tol;

  const std::size_t m = s.size();
  trace.N0 = s[m - 1].N;
  if (m >= 3) {
    const double a = s[m - 3].N, b = s[m - 2].N, c = s[m - 1].N;
    const double den = (c - b) - (b - a);
    if (std::abs(den) > 1e-12 && std::abs(c - b) < std::abs(b - a)) {
      const double aitken = c - (c - b) * (c - b) / den;
      if (std::abs(aitken - c) <= std::abs(c - a))
        trace.N0 = aitken;
    }
  }

  const int n = domain.dim();
  const std::size_t first = m >= 6 ? m / 2 : 0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (std::size_t j = first; j < m; ++j) {
    const double x = std::log(s[j].r);
    const double y = 0.5 * std::log(s[j].H) - 0.5 * (n - 1) * x;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  if (cnt >= 2) {
    const double den = cnt * sxx - sx * sx;
    trace.exponent = (cnt * sxy - sx * sy) / den;
  } else {
    trace.exponent = trace.N0;
  }
  trace.exponent_gap = std::abs(trace.exponent - trace.N0);
  return trace;
}

RegularityReport epsilon_regularity_report(const Field &field, const Domain &domain, const Point &Q, double epsilon,
                                           double ratio, int depth) {
  if (!is_flat_boundary_point(domain, Q))
    throw ValidationError("epsilon_regularity: Q is not a flat boundary point");
  const BlowupTrace trace = blowup_trace(field, domain, Q, ratio, depth);
  RegularityReport rep;
  rep.Q = Q;
  rep.N0 = trace.N0;
  rep.normal_derivative = normal_derivative(field, domain, Q);
  const int n = domain.dim();
  rep.margin = strata_margin(field, domain, Q, n - 2, trace.scales.back().r, trace.scales.front().r);
  rep.member = rep.margin >= epsilon;
  rep.passed = rep.N0 >= 2.0 - 0.05 && rep.member;
  return rep;
}

bool epsilon_regularity_check(const Field &field, const Domain &domain, const Point &Q, double epsilon, double tol) {
  if (!is_flat_boundary_point(domain, Q))
    throw ValidationError("epsilon_regularity_check: Q is not a flat boundary point");
  const double dn = normal_derivative(field, domain, Q);
  if (!(std::abs(dn) <= tol)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "epsilon_regularity_check: not a critical point (normal derivative %.6g)", dn);
    throw ValidationError(buf);
  }
  return epsilon_regularity_report(field, domain, Q, epsilon).passed;
}

std::vector<MinkowskiRow> minkowski_content(const std::vector<Point> &points, double s,
                                            const std::vector<double> &radii, double resolution) {
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0))
      throw InvalidScale("minkowski_content: radii must be positive");
    if (i > 0 && !(radii[i] < radii[i - 1]))
      throw InvalidScale("minkowski_content: radii must be decreasing");
  }
  if (!(resolution > 0.0))
    throw InvalidScale("minkowski_content: resolution must be positive");
  std::vector<MinkowskiRow> rows;
  for (double r : radii) {
    MinkowskiRow row{r, 0.0, 0.0};
    if (!points.empty()) {
      const int n = static_cast<int>(points.front().size());
      row.volume = tubular_volume(points, r, r * resolution);
      row.content = row.volume / std::pow(2.0 * r, n - s);
    }
    rows.push_back(row);
  }
  return rows;
}

void write_critical_csv(std::ostream &os, const std::vector<CriticalPoint> &points) {
  const int n = points.empty() ? 2 : static_cast<int>(points.front().location.size());
  os << "x,y" << (n == 3 ? ",z" : "") << ",kind,gradient_norm,normal_derivative,N0\n";
  char buf[64];
  for (const auto &c : points) {
    for (int d = 0; d < n; ++d) {
      std::snprintf(buf, sizeof buf, "%.12g", c.location[d]);
      os << buf << ',';
    }
    os << kind_name(c.kind);
    for (double v : {c.gradient_norm, c.normal_derivative, c.N0}) {
      std::snprintf(buf, sizeof buf, ",%.12g", v);
      os << buf;
    }
    os << '\n';
  }
}

void write_trace_csv(std::ostream &os, const BlowupTrace &trace) {
  os << "r,H,D,N\n";
  char buf[160];
  for (const auto &s : trace.scales) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g\n", s.r, s.H, s.D, s.N);
    os << buf;
  }
}

} // namespace almgren
