#include "almgren/covering.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <unordered_set>

namespace almgren {

namespace {

constexpr double rel_tol = 1e-12;

double dist_to_plane(const Point &x, const AffinePlane<double> &L) {
  Vector d = x - L.base;
  for (const auto &v : L.directions)
    d -= d.dot(v) * v;
  return d.norm();
}

// Greedy maximal net in index order: accepted points are pairwise >= spacing apart.
std::vector<std::size_t> greedy_net(const std::vector<Point> &pts, const std::vector<std::size_t> &cands,
                                    double spacing) {
  std::vector<std::size_t> net;
  for (std::size_t i : cands) {
    bool far = true;
    for (std::size_t j : net)
      if ((pts[i] - pts[j]).norm() < spacing) {
        far = false;
        break;
      }
    if (far)
      net.push_back(i);
  }
  return net;
}

int add_node(std::vector<BallNode> &nodes, int parent, int tree, const Point &c, double r, BallTag tag) {
  BallNode n;
  n.id = static_cast<int>(nodes.size());
  n.parent = parent;
  n.tree = tree;
  n.center = c;
  n.radius = r;
  n.tag = tag;
  nodes.push_back(n);
  return n.id;
}

void apply(BallNode &node, const Classification &c) {
  node.tag = c.tag;
  node.witness_value = c.witness_value;
  node.witness = c.witness;
  node.plane = c.plane;
}

int first_parent(const std::vector<BallNode> &nodes, const std::vector<int> &parents, const Point &x) {
  for (int p : parents)
    if ((x - nodes[p].center).norm() <= nodes[p].radius * (1 + rel_tol))
      return p;
  return parents.empty() ? -1 : parents.front();
}

bool covers(const std::vector<BallNode> &nodes, const std::vector<int> &ids, const Point &x) {
  for (int id : ids)
    if ((x - nodes[id].center).norm() <= nodes[id].radius * (1 + rel_tol))
      return true;
  return false;
}

void guard_depth(int level) {
  if (level > 64)
    throw SolverError("tree recursion exceeded 64 levels", 0.0, level);
}

} // namespace

const char *tag_name(BallTag tag) {
  switch (tag) {
  case BallTag::good:
    return "good";
  case BallTag::bad:
    return "bad";
  case BallTag::stop:
    return "stop";
  }
  return "?";
}

void CoverParams::validate() const {
  if (!(rho > 0.0 && rho <= 0.1 + 1e-15))
    throw ValidationError("cover: rho must lie in (0, 1/10]");
  if (!(eta > 0.0 && eta <= eta_prime))
    throw ValidationError("cover: need 0 < eta <= eta_prime");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw ValidationError("cover: gamma must lie in (0, 1)");
  if (!(epsilon > 0.0))
    throw ValidationError("cover: epsilon must be positive");
  if (!(R > 0.0 && R < 1.0))
    throw ValidationError("cover: R must lie in (0, 1)");
  if (k < 0 || k > 2)
    throw ValidationError("cover: k must lie in [0, n-1]");
}

CoverContext::CoverContext(const Field &field, const Domain &domain, const Balld &region, const CoverParams &params,
                           const Quadrature &quad)
    : field_(field), domain_(domain), region_(region), params_(params), quad_(quad) {
  params_.validate();
  if (params_.k > domain.dim() - 1)
    throw ValidationError("cover: k must lie in [0, n-1]");
  step_ = params_.lattice_step > 0.0 ? params_.lattice_step : region.radius / 16.0;
  finest_ = std::max(params_.eta * params_.R, params_.resolution_factor * field.resolution());
  if (!(finest_ < region.radius))
    throw ValidationError("cover: finest scale must be below the region radius");
  strata_ = strata_scan(field, domain, region, step_, params_.k, params_.epsilon, finest_, region.radius).members;
  E_ = params_.E > 0.0 ? params_.E : measure_E(field, domain, region, step_, 4, strata_, quad_);
}

std::vector<std::size_t> CoverContext::strata_in(const Point &c, double r) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < strata_.size(); ++i)
    if ((strata_[i] - c).norm() <= r * (1 + rel_tol))
      out.push_back(i);
  return out;
}

double CoverContext::N_at(const Point &x, double s) const {
  try {
    return frequency(field_, domain_, x, s, quad_);
  } catch (const DegenerateError &) {
    return 0.0;
  }
}

double CoverContext::N(std::size_t i, double s) { return N(std::vector<std::size_t>{i}, s).front(); }

std::vector<double> CoverContext::N(const std::vector<std::size_t> &idx, double s) {
  std::vector<double> out(idx.size());
  std::vector<std::size_t> missing;
  {
    std::lock_guard lock(mutex_);
    for (std::size_t t = 0; t < idx.size(); ++t) {
      auto it = cache_.find({idx[t], s});
      if (it == cache_.end())
        missing.push_back(t);
      else
        out[t] = it->second;
    }
  }
  parallel_for(missing.size(), [&](std::size_t m) { out[missing[m]] = N_at(strata_[idx[missing[m]]], s); });
  std::lock_guard lock(mutex_);
  for (std::size_t t : missing)
    cache_[{idx[t], s}] = out[t];
  return out;
}

double measure_E(const Field &field, const Domain &domain, const Balld &region, double step, int stride,
                 const std::vector<Point> &extra, const Quadrature &quad) {
  std::vector<Point> pts;
  const auto lattice = lattice_points(domain, region, step);
  for (std::size_t i = 0; i < lattice.size(); i += std::max(stride, 1))
    pts.push_back(lattice[i]);
  pts.insert(pts.end(), extra.begin(), extra.end());
  std::vector<double> vals(pts.size(), 0.0);
  parallel_for(pts.size(), [&](std::size_t i) {
    vals[i] = max_frequency(field, domain, pts[i], 2.0 * region.radius, 4, quad);
  });
  double E = 0.0;
  for (double v : vals)
    if (std::isfinite(v))
      E = std::max(E, v);
  return E;
}

Classification classify_ball(CoverContext &ctx, const Balld &ball) {
  const CoverParams &P = ctx.params();
  Classification c;
  const auto idx = ctx.strata_in(ball.center, ball.radius);
  if (idx.empty())
    return c;
  const auto vals = ctx.N(idx, P.gamma * P.rho * ball.radius);
  std::size_t worst = 0;
  for (std::size_t t = 1; t < vals.size(); ++t)
    if (vals[t] < vals[worst])
      worst = t;
  c.witness_value = vals[worst];
  c.witness = ctx.strata()[idx[worst]];
  if (vals[worst] >= ctx.E() - P.eta_prime)
    return c;

  c.tag = BallTag::bad;
  const auto drops = ctx.N(idx, 2.0 * P.eta * ball.radius);
  DiscreteMeasure small;
  for (std::size_t t = 0; t < idx.size(); ++t)
    if (drops[t] >= ctx.E() - P.eta)
      small.add(ctx.strata()[idx[t]], 1.0);
  c.small_drop = small.size();
  if (P.k == 0 || small.size() == 0)
    return c;
  AffinePlane<double> L;
  if (P.k == 1) {
    L.base = Point::Zero(ball.center.size());
    for (const auto &x : small.points)
      L.base += x;
    L.base /= static_cast<double>(small.size());
  } else {
    const BetaResult b = beta_eigen(small, ball.center, ball.radius * (1 + rel_tol), P.k - 1);
    L = b.plane;
  }
  c.plane = L;
  return c;
}

TreeReport good_tree(CoverContext &ctx, std::vector<BallNode> &nodes, int root) {
  const CoverParams &P = ctx.params();
  TreeReport rep;
  rep.root = root;
  rep.good = true;
  const Point x = nodes[root].center;
  const double rA = nodes[root].radius;
  const int tree = root;
  nodes[root].tree = tree;
  const auto inside = ctx.strata_in(x, rA);

  std::vector<int> good_prev{root};
  std::vector<int> bad_all;
  double rj = rA;
  for (int j = 1; !good_prev.empty(); ++j) {
    guard_depth(j);
    const double r_prev = rj;
    rj = r_prev * P.rho;
    std::vector<std::size_t> cands;
    for (std::size_t i : inside) {
      const Point &q = ctx.strata()[i];
      bool near_good = false;
      for (int g : good_prev)
        if ((q - nodes[g].center).norm() <= r_prev * (1 + rel_tol)) {
          near_good = true;
          break;
        }
      if (near_good && !covers(nodes, bad_all, q))
        cands.push_back(i);
    }
    const auto net = greedy_net(ctx.strata(), cands, 0.4 * rj);
    if (net.empty())
      break;
    const bool terminal = rj <= P.R * (1 + rel_tol);
    std::vector<int> good_next;
    for (std::size_t i : net) {
      const Point &z = ctx.strata()[i];
      const int parent = first_parent(nodes, good_prev, z);
      const int id = add_node(nodes, parent, tree, z, rj, BallTag::stop);
      if (terminal) {
        rep.stops.push_back(id);
        continue;
      }
      apply(nodes[id], classify_ball(ctx, Balld(z, rj)));
      if (nodes[id].tag == BallTag::good) {
        good_next.push_back(id);
      } else {
        bad_all.push_back(id);
        rep.leaves.push_back(id);
      }
    }
    if (terminal)
      break;
    good_prev = std::move(good_next);
  }

  for (int id : rep.leaves)
    rep.leaf_packing += std::pow(nodes[id].radius, P.k);
  for (int id : rep.stops) {
    rep.stop_packing += std::pow(nodes[id].radius, P.k);
    const double r = nodes[id].radius;
    if (r < P.rho * P.R * (1 - rel_tol) || r > P.R * (1 + rel_tol))
      rep.size_control = false;
  }
  std::vector<int> out = rep.stops;
  out.insert(out.end(), rep.leaves.begin(), rep.leaves.end());
  for (std::size_t i : inside)
    if (!covers(nodes, out, ctx.strata()[i]))
      rep.covering_control = false;
  return rep;
}

TreeReport bad_tree(CoverContext &ctx, std::vector<BallNode> &nodes, int root) {
  const CoverParams &P = ctx.params();
  TreeReport rep;
  rep.root = root;
  rep.good = false;
  const Point x = nodes[root].center;
  const double rA = nodes[root].radius;
  const int tree = root;
  nodes[root].tree = tree;
  const auto inside = ctx.strata_in(x, rA);

  std::vector<int> bad_prev{root};
  double ri = rA;
  auto add_stops = [&](const std::vector<std::size_t> &cands, double r_prev) {
    const double rs = P.eta * r_prev;
    for (std::size_t i : greedy_net(ctx.strata(), cands, 0.4 * rs)) {
      const Point &s = ctx.strata()[i];
      const int id = add_node(nodes, first_parent(nodes, bad_prev, s), tree, s, rs, BallTag::stop);
      rep.stops.push_back(id);
    }
  };

  for (int i = 1; !bad_prev.empty(); ++i) {
    guard_depth(i);
    const double r_prev = ri;
    ri = r_prev * P.rho;
    std::vector<char> in_stop(ctx.strata().size(), 0), in_refine(ctx.strata().size(), 0);
    for (int b : bad_prev)
      for (std::size_t q : inside) {
        const Point &y = ctx.strata()[q];
        if ((y - nodes[b].center).norm() > r_prev * (1 + rel_tol))
          continue;
        const bool terminal = ri <= P.R * (1 + rel_tol);
        if (!terminal && nodes[b].plane && dist_to_plane(y, *nodes[b].plane) < 2.0 * P.rho * r_prev)
          in_refine[q] = 1;
        else
          in_stop[q] = 1;
      }
    std::vector<std::size_t> stop_c, refine_c;
    for (std::size_t q : inside) {
      if (in_stop[q])
        stop_c.push_back(q);
      if (in_refine[q])
        refine_c.push_back(q);
    }
    add_stops(stop_c, r_prev);
    if (ri <= P.R * (1 + rel_tol))
      break;

    std::vector<int> bad_next;
    for (std::size_t q : greedy_net(ctx.strata(), refine_c, 0.4 * ri)) {
      const Point &z = ctx.strata()[q];
      const int id = add_node(nodes, first_parent(nodes, bad_prev, z), tree, z, ri, BallTag::good);
      apply(nodes[id], classify_ball(ctx, Balld(z, ri)));
      if (nodes[id].tag == BallTag::good)
        rep.leaves.push_back(id);
      else
        bad_next.push_back(id);
    }
    bad_prev = std::move(bad_next);
  }

  for (int id : rep.leaves)
    rep.leaf_packing += std::pow(nodes[id].radius, P.k);
  const double etaR = P.eta * P.R;
  for (int id : rep.stops) {
    BallNode &s = nodes[id];
    rep.stop_packing += std::pow(s.radius, P.k);
    if (s.radius >= etaR * (1 - rel_tol) && s.radius <= P.R * (1 + rel_tol))
      continue;
    // sup of N(p, 2 r_s) over p in B_{2 r_s}(s), sampled at the center and
    // the axis points at distances r_s and 2 r_s.
    const int n = static_cast<int>(s.center.size());
    double sup = ctx.N_at(s.center, 2.0 * s.radius);
    for (int d = 0; d < n; ++d)
      for (double t : {-2.0, -1.0, 1.0, 2.0}) {
        Point p = s.center;
        p[d] += t * s.radius;
        if (in_closure(ctx.domain(), p))
          sup = std::max(sup, ctx.N_at(p, 2.0 * s.radius));
      }
    s.drop_sup = sup;
    if (sup > ctx.E() - P.eta / 2)
      rep.size_control = false;
  }
  std::vector<int> out = rep.stops;
  out.insert(out.end(), rep.leaves.begin(), rep.leaves.end());
  for (std::size_t q : inside)
    if (!covers(nodes, out, ctx.strata()[q]))
      rep.covering_control = false;
  return rep;
}

CoverResult build_cover(const Field &field, const Domain &domain, const Balld &region, const CoverParams &params,
                        const Quadrature &quad) {
  CoverContext ctx(field, domain, region, params, quad);
  CoverResult res;
  res.params = params;
  res.E = ctx.E();
  res.eta_R = params.eta * params.R;
  res.finest_scale = ctx.finest_scale();
  res.strata = ctx.strata();

  const int root = add_node(res.nodes, -1, 0, region.center, region.radius, BallTag::good);
  apply(res.nodes[root], classify_ball(ctx, region));
  std::vector<int> frontier{root};
  std::vector<int> stops;
  while (!frontier.empty()) {
    if (++res.alternations > 64)
      throw SolverError("cover: more than 64 tree alternations", 0.0, res.alternations);
    std::vector<int> next;
    for (int f : frontier) {
      TreeReport t = res.nodes[f].tag == BallTag::good ? good_tree(ctx, res.nodes, f) : bad_tree(ctx, res.nodes, f);
      next.insert(next.end(), t.leaves.begin(), t.leaves.end());
      stops.insert(stops.end(), t.stops.begin(), t.stops.end());
      res.radius_laws = res.radius_laws && t.size_control;
      for (int l : t.leaves) {
        const int level =
            static_cast<int>(std::lround(std::log(res.nodes[l].radius / region.radius) / std::log(params.rho)));
        ++res.leaves_per_level[level];
      }
      res.trees.push_back(std::move(t));
    }
    frontier = std::move(next);
  }

  for (int id : stops) {
    const BallNode &s = res.nodes[id];
    res.cover.push_back({s.center, std::max(params.R, s.radius), s.radius, id});
    res.stop_packing += std::pow(s.radius, params.k);
  }
  for (const auto &b : res.cover)
    res.packing += std::pow(b.radius, params.k);
  res.count_R_k = static_cast<double>(res.cover.size()) * std::pow(params.R, params.k);
  for (const auto &q : res.strata) {
    bool hit = false;
    for (const auto &b : res.cover)
      if ((q - b.center).norm() <= b.radius * (1 + rel_tol)) {
        hit = true;
        break;
      }
    if (!hit)
      ++res.uncovered;
  }
  res.covered = res.uncovered == 0;
  return res;
}

double tubular_volume(const std::vector<Point> &points, double r, double h) {
  if (points.empty())
    return 0.0;
  if (!(r > 0.0 && h > 0.0))
    throw InvalidScale("tubular_volume: radii must be positive");
  const int n = static_cast<int>(points.front().size());
  struct Hash {
    std::size_t operator()(const std::array<long, 3> &a) const {
      std::size_t s = 1469598103934665603ull;
      for (long v : a)
        s = (s ^ static_cast<std::size_t>(v)) * 1099511628211ull;
      return s;
    }
  };
  std::unordered_set<std::array<long, 3>, Hash> cells;
  for (const auto &p : points) {
    std::array<long, 3> lo{0, 0, 0}, hi{0, 0, 0};
    for (int d = 0; d < n; ++d) {
      lo[d] = static_cast<long>(std::ceil((p[d] - r) / h));
      hi[d] = static_cast<long>(std::floor((p[d] + r) / h));
    }
    std::array<long, 3> idx = lo;
    for (;;) {
      double d2 = 0.0;
      for (int d = 0; d < n; ++d) {
        const double t = idx[d] * h - p[d];
        d2 += t * t;
      }
      if (d2 <= r * r * (1 + rel_tol))
        cells.insert(idx);
      int d = 0;
      while (d < n && ++idx[d] > hi[d]) {
        idx[d] = lo[d];
        ++d;
      }
      if (d == n)
        break;
    }
  }
  return static_cast<double>(cells.size()) * std::pow(h, n);
}

std::vector<VolumeRow> volume_estimate(const Field &field, const Domain &domain, const Balld &region, int k,
                                       double epsilon, const std::vector<double> &radii) {
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] < radii[i - 1]))
      throw ValidationError("volume_estimate: radii must be decreasing");
  const int n = domain.dim();
  std::vector<VolumeRow> rows;
  for (double r : radii) {
    const double finest = std::max(r, field.resolution());
    const StrataScan scan = strata_scan(field, domain, region, r, k, epsilon, finest, region.radius);
    VolumeRow row;
    row.r = r;
    row.members = scan.members.size();
    row.volume = tubular_volume(scan.members, r, r / 8.0);
    row.ratio = row.volume / std::pow(r, n - k);
    row.minkowski = row.volume / std::pow(2.0 * r, n - k);
    rows.push_back(row);
  }
  return rows;
}

} // namespace almgren
