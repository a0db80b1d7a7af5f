#include "almgren/beta.hpp"
#include "almgren/optim.hpp"

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

namespace almgren {

namespace {

struct Restricted {
  std::vector<Point> points;
  std::vector<double> weights;
  double mass = 0.0;
};

Restricted restrict_to(const DiscreteMeasure &mu, const Point &p, double r) {
  Restricted out;
  for (std::size_t i = 0; i < mu.size(); ++i)
    if ((mu.points[i] - p).norm() <= r && mu.weights[i] > 0.0) {
      out.points.push_back(mu.points[i]);
      out.weights.push_back(mu.weights[i]);
      out.mass += mu.weights[i];
    }
  return out;
}

// sum_i w_i (n(theta) . x_i - c)^2 with n(theta) = (-sin theta, cos theta).
double line_cost(const Restricted &m, double theta, double c) {
  const double nx = -std::sin(theta), ny = std::cos(theta);
  double s = 0.0;
  for (std::size_t i = 0; i < m.points.size(); ++i) {
    const double d = nx * m.points[i][0] + ny * m.points[i][1] - c;
    s += m.weights[i] * d * d;
  }
  return s;
}

std::pair<double, double> offset_range(const Restricted &m, double theta) {
  const double nx = -std::sin(theta), ny = std::cos(theta);
  double lo = 1e300, hi = -1e300;
  for (const auto &x : m.points) {
    const double t = nx * x[0] + ny * x[1];
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  return {lo, hi};
}

double best_offset(const Restricted &m, double theta) {
  const auto [lo, hi] = offset_range(m, theta);
  if (hi - lo <= 0.0)
    return lo;
  return golden_section([&](double c) { return line_cost(m, theta, c); }, lo, hi, 1e-14 * (1.0 + hi - lo));
}

} // namespace

BetaResult beta_bruteforce(const DiscreteMeasure &mu, const Point &p, double r, int k) {
  if (p.size() != 2 || k != 1)
    throw DomainError("beta_bruteforce supports only dim 2 and k 1");
  if (!(r > 0.0))
    throw InvalidScale("beta: radius must be positive");
  mu.validate();
  const Restricted m = restrict_to(mu, p, r);
  if (m.points.size() > 1000)
    throw ValidationError("beta_bruteforce: more than 1000 points in the ball");

  BetaResult out;
  out.mass = m.mass;
  out.eigenvalues.assign(2, 0.0);
  if (m.points.empty())
    return out;

  constexpr int angles = 3600;
  double best_theta = 0.0, best_c = 0.0, best = 1e300;
  for (int a = 0; a < angles; ++a) {
    const double theta = pi * a / angles;
    const double c = best_offset(m, theta);
    const double v = line_cost(m, theta, c);
    if (v < best) {
      best = v;
      best_theta = theta;
      best_c = c;
    }
  }

  Eigen::VectorXd x0(2);
  x0 << best_theta, best_c;
  const double scale = std::max(r, 1e-300);
  const auto polish = nelder_mead(
      [&](const Eigen::VectorXd &x) { return line_cost(m, x[0], x[1]); }, x0, 0.5 * pi / angles + 1e-3 * scale);
  if (polish.value < best) {
    best = polish.value;
    best_theta = polish.x[0];
    best_c = polish.x[1];
  }
  // Final exact 1D refinement of the offset at the polished angle.
  const double c = best_offset(m, best_theta);
  const double v = line_cost(m, best_theta, c);
  if (v < best) {
    best = v;
    best_c = c;
  }

  const Point dir = make_point({std::cos(best_theta), std::sin(best_theta)});
  const Point nrm = make_point({-std::sin(best_theta), std::cos(best_theta)});
  out.plane.base = best_c * nrm;
  out.plane.directions.push_back(dir);
  out.beta = std::sqrt(std::max(best, 0.0) / r / (r * r));
  return out;
}

std::vector<BetaRow> beta_batch(const DiscreteMeasure &mu, const std::vector<BetaQuery> &queries, int k) {
  std::vector<BetaRow> rows(queries.size());
  parallel_for(queries.size(), [&](std::size_t i) {
    rows[i] = BetaRow{queries[i].p, queries[i].r, k, beta_eigen(mu, queries[i].p, queries[i].r, k).beta};
  });
  return rows;
}

DiscreteMeasure read_measure_csv(std::istream &is) {
  DiscreteMeasure mu;
  std::string line;
  bool first = true;
  int dim = 0;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      char *end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      while (end && (*end == ' ' || *end == '\r' || *end == '\t'))
        ++end;
      if (end == cell.c_str() || (end && *end != '\0')) {
        numeric = false;
        break;
      }
      vals.push_back(v);
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      throw ValidationError("measure CSV: non-numeric row " + std::to_string(lineno));
    }
    first = false;
    if (vals.size() != 3 && vals.size() != 4)
      throw ValidationError("measure CSV: expected x,y[,z],w on row " + std::to_string(lineno));
    const int d = static_cast<int>(vals.size()) - 1;
    if (dim == 0)
      dim = d;
    else if (d != dim)
      throw ValidationError("measure CSV: mixed dimensions on row " + std::to_string(lineno));
    Point x(d);
    for (int j = 0; j < d; ++j)
      x[j] = vals[j];
    mu.add(x, vals.back());
  }
  mu.validate();
  return mu;
}

void write_measure_csv(std::ostream &os, const DiscreteMeasure &mu) {
  const int d = mu.dim() == 0 ? 2 : mu.dim();
  os << (d == 2 ? "x,y,w\n" : "x,y,z,w\n");
  char buf[64];
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (int j = 0; j < d; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,", mu.points[i][j]);
      os << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g\n", mu.weights[i]);
    os << buf;
  }
}

void write_beta_csv(std::ostream &os, const std::vector<BetaRow> &rows) {
  const int d = rows.empty() ? 2 : static_cast<int>(rows.front().p.size());
  os << (d == 2 ? "p_x,p_y,r,k,beta\n" : "p_x,p_y,p_z,r,k,beta\n");
  char buf[64];
  for (const auto &row : rows) {
    for (int j = 0; j < d; ++j) {
      std::snprintf(buf, sizeof buf, "%.12g,", row.p[j]);
      os << buf;
    }
    std::snprintf(buf, sizeof buf, "%.12g,%d,%.12g\n", row.r, row.k, row.beta);
    os << buf;
  }
}

} // namespace almgren
