#include "almgren/reifenberg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

namespace almgren {

namespace {

// Atoms sorted by first coordinate for window queries.
class SortedAtoms {
public:
  explicit SortedAtoms(const DiscreteMeasure &mu) : mu_(mu), order_(mu.size()) {
    for (std::size_t i = 0; i < order_.size(); ++i)
      order_[i] = i;
    std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      return mu.points[a][0] < mu.points[b][0] || (mu.points[a][0] == mu.points[b][0] && a < b);
    });
    keys_.resize(order_.size());
    for (std::size_t i = 0; i < order_.size(); ++i)
      keys_[i] = mu.points[order_[i]][0];
  }

  template <typename F>
  void within(const Point &x, double r, F &&f) const {
    auto lo = std::lower_bound(keys_.begin(), keys_.end(), x[0] - r);
    auto hi = std::upper_bound(keys_.begin(), keys_.end(), x[0] + r);
    for (auto it = lo; it != hi; ++it) {
      const std::size_t j = order_[it - keys_.begin()];
      if ((mu_.points[j] - x).norm() <= r)
        f(j);
    }
  }

private:
  const DiscreteMeasure &mu_;
  std::vector<std::size_t> order_;
  std::vector<double> keys_;
};

std::vector<Point> triggers_at(const DiscreteMeasure &mu, double r, double reach, int dim) {
  std::set<std::vector<long>> cells;
  std::vector<Point> out;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    if (mu.weights[j] <= 0.0)
      continue;
    const Point &z = mu.points[j];
    if (z.norm() + r <= 2.0)
      out.push_back(z);
    std::vector<long> lo(dim), hi(dim);
    for (int d = 0; d < dim; ++d) {
      lo[d] = static_cast<long>(std::ceil((z[d] - reach) / r - 1e-12));
      hi[d] = static_cast<long>(std::floor((z[d] + reach) / r + 1e-12));
    }
    std::vector<long> idx = lo;
    for (;;) {
      Point x(dim);
      for (int d = 0; d < dim; ++d)
        x[d] = idx[d] * r;
      if ((x - z).norm() <= reach * (1 + 1e-12) && x.norm() + r <= 2.0)
        cells.insert(idx);
      int d = 0;
      while (d < dim && ++idx[d] > hi[d]) {
        idx[d] = lo[d];
        ++d;
      }
      if (d == dim)
        break;
    }
  }
  for (const auto &idx : cells) {
    Point x(dim);
    for (int d = 0; d < dim; ++d)
      x[d] = idx[d] * r;
    out.push_back(x);
  }
  return out;
}

} // namespace

double unit_ball_volume(int k) { return std::pow(pi, 0.5 * k) / std::tgamma(0.5 * k + 1.0); }

DiscreteMeasure BallFamily::measure() const {
  DiscreteMeasure mu;
  for (const auto &b : balls)
    mu.add(b.center, std::pow(b.radius, k));
  return mu;
}

void BallFamily::validate() const {
  for (const auto &b : balls) {
    if (b.center.size() != dim)
      throw ValidationError("ball family: center has wrong dimension");
    if (!(b.radius > 0.0) || b.radius > 1.0)
      throw ValidationError("ball family: radii must lie in (0, 1]");
  }
  std::vector<std::size_t> order(balls.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return balls[a].center[0] - balls[a].radius < balls[b].center[0] - balls[b].radius;
  });
  for (std::size_t a = 0; a < order.size(); ++a) {
    const Balld &A = balls[order[a]];
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      const Balld &B = balls[order[b]];
      if (B.center[0] - B.radius > A.center[0] + A.radius)
        break;
      const double gap = (A.center - B.center).norm() - (A.radius + B.radius);
      if (gap < -1e-12 * (A.radius + B.radius)) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "ball family: balls %zu and %zu overlap (gap %.3g)",
                      std::min(order[a], order[b]), std::max(order[a], order[b]), gap);
        throw ValidationError(buf);
      }
    }
  }
}

ReifVerdict reifenberg_sweep(const DiscreteMeasure &mu, int k, double delta, double eps_k, int max_depth) {
  if (!(delta > 0.0))
    throw ValidationError("reifenberg: delta must be positive");
  if (max_depth < 0 || max_depth > 30)
    throw ValidationError("reifenberg: max_depth must lie in [0, 30]");
  mu.validate();
  ReifVerdict out;
  out.per_level.resize(max_depth + 1);
  const int dim = mu.dim();
  for (std::size_t j = 0; j < mu.size(); ++j)
    if (mu.points[j].norm() <= 1.0)
      out.packing += mu.weights[j];
  if (mu.size() == 0)
    return out;
  if (k < 1 || k > dim - 1)
    throw DomainError("reifenberg: k must lie in [1, n-1]");

  const std::size_t N = mu.size();
  const int L = max_depth + 1;
  // tail[j * L + l] = sum_{i >= l} beta^2(z_j, 16 r_i).
  std::vector<double> tail(N * L, 0.0);
  parallel_for(N, [&](std::size_t j) {
    double acc = 0.0;
    for (int i = max_depth; i >= 0; --i) {
      const double b = beta_eigen(mu, mu.points[j], 16.0 * std::ldexp(1.0, -i), k).beta;
      acc += b * b;
      tail[j * L + i] = acc;
    }
  });

  const SortedAtoms atoms(mu);
  for (int l = 0; l <= max_depth; ++l) {
    const double r = std::ldexp(1.0, -l);
    const std::vector<Point> trig = triggers_at(mu, r, eps_k > 0.0 ? r : 2.0 * r, dim);
    std::vector<ReifWitness> wit(trig.size());
    std::vector<char> active(trig.size(), 0);
    parallel_for(trig.size(), [&](std::size_t t) {
      const Point &x = trig[t];
      double m = 0.0;
      atoms.within(x, r, [&](std::size_t j) { m += mu.weights[j]; });
      if (eps_k > 0.0 && m < eps_k * std::pow(r, k))
        return;
      double lhs = 0.0;
      atoms.within(x, 2.0 * r, [&](std::size_t j) { lhs += mu.weights[j] * tail[j * L + l]; });
      wit[t] = ReifWitness{x, l, r, m, lhs, std::pow(r, k) * delta * delta};
      active[t] = 1;
    });
    for (std::size_t t = 0; t < trig.size(); ++t) {
      if (!active[t])
        continue;
      ++out.triggers;
      const ReifWitness &w = wit[t];
      if (!(w.lhs < w.rhs))
        out.satisfied = false;
      auto &lvl = out.per_level[l];
      if (!lvl || w.lhs / w.rhs > lvl->lhs / lvl->rhs)
        lvl = w;
      if (!out.worst || w.lhs / w.rhs > out.worst->lhs / out.worst->rhs)
        out.worst = w;
    }
  }
  return out;
}

ReifVerdict discrete_reifenberg_check(const BallFamily &family, double delta, double eps_k, int max_depth) {
  family.validate();
  if (!(eps_k > 0.0))
    throw ValidationError("reifenberg: eps_k must be positive");
  if (family.balls.empty()) {
    ReifVerdict v;
    v.per_level.resize(std::max(max_depth, 0) + 1);
    return v;
  }
  return reifenberg_sweep(family.measure(), family.k, delta, eps_k, max_depth);
}

double median_spacing(const std::vector<Point> &points) {
  if (points.size() < 2)
    return 0.0;
  DiscreteMeasure tmp;
  for (const auto &p : points)
    tmp.add(p, 1.0);
  const SortedAtoms atoms(tmp);
  std::vector<double> nn(points.size(), 0.0);
  parallel_for(points.size(), [&](std::size_t i) {
    double r = 1e-3;
    for (;;) {
      double best = 1e300;
      atoms.within(points[i], r, [&](std::size_t j) {
        if (j != i)
          best = std::min(best, (points[j] - points[i]).norm());
      });
      if (best < 1e300) {
        nn[i] = best;
        return;
      }
      r *= 2.0;
    }
  });
  std::nth_element(nn.begin(), nn.begin() + nn.size() / 2, nn.end());
  return nn[nn.size() / 2];
}

ReifVerdict rectifiable_check(const DiscreteMeasure &sample, int k, double delta, int max_depth) {
  sample.validate();
  for (const auto &p : sample.points)
    if (p.norm() > 2.0)
      throw ValidationError("rectifiable_check: sample must lie in B_2(0)");
  if (sample.size() == 0) {
    ReifVerdict v;
    v.per_level.resize(std::max(max_depth, 0) + 1);
    return v;
  }
  const double h = median_spacing(sample.points);
  const double w = sample.size() == 1 ? 1.0 : std::pow(h, k);
  DiscreteMeasure mu = sample;
  for (auto &x : mu.weights)
    x = w;
  ReifVerdict out = reifenberg_sweep(mu, k, delta, 0.0, max_depth);
  out.weight = w;

  const SortedAtoms atoms(mu);
  const double omega = unit_ball_volume(k);
  for (int l = 0; l <= max_depth; ++l) {
    const double r = std::ldexp(1.0, -l);
    for (const auto &x : mu.points) {
      if (x.norm() + r > 1.0)
        continue;
      double m = 0.0;
      atoms.within(x, r, [&](std::size_t j) { m += mu.weights[j]; });
      out.ahlfors_ratio = std::max(out.ahlfors_ratio, m / (omega * std::pow(r, k)));
    }
  }
  return out;
}

BallFamily collinear_family(int m, const Point &dir) {
  BallFamily f;
  f.k = 1;
  f.dim = static_cast<int>(dir.size());
  const double tau = std::ldexp(1.0, -m);
  for (int i = 0; i < (1 << m); ++i)
    f.balls.emplace_back(Point((-1.0 + tau + 2.0 * tau * i) * dir.normalized()), tau);
  return f;
}

BallFamily square_grid_family(double tau, double half) {
  BallFamily f;
  f.k = 1;
  for (double x = -half + tau; x < half; x += 2 * tau)
    for (double y = -half + tau; y < half; y += 2 * tau)
      f.balls.emplace_back(make_point({x, y}), tau);
  return f;
}

} // namespace almgren
