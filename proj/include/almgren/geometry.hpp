#ifndef ALMGREN_GEOMETRY_HPP
#define ALMGREN_GEOMETRY_HPP

#include "almgren/core.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

namespace almgren {

/// The closed set {x : normal . x <= offset}.
template <typename Scalar>
struct HalfSpace {
  PointT<Scalar> normal;
  Scalar offset{0};

  Scalar signed_distance(const PointT<Scalar> &x) const { return normal.dot(x) - offset; }

  bool same_face(const HalfSpace &other, Scalar tol = Scalar(1e-12)) const {
    return (normal - other.normal).norm() <= tol && std::abs(offset - other.offset) <= tol;
  }
};

template <typename Scalar>
struct Ball {
  PointT<Scalar> center;
  Scalar radius{1};

  Ball() = default;
  Ball(PointT<Scalar> c, Scalar r) : center(std::move(c)), radius(r) {
    if (!(r > Scalar(0)))
      throw InvalidScale("ball radius must be positive");
  }

  bool contains(const PointT<Scalar> &x) const { return (x - center).norm() <= radius; }
};

enum class Membership { interior, boundary, exterior };

/// Open intersection of finitely many half-spaces in R^2 or R^3. An empty
/// list of halves is the whole space.
template <typename Scalar>
class ConvexDomain {
public:
  using PointType = PointT<Scalar>;

  ConvexDomain() = default;

  ConvexDomain(int dim, std::vector<HalfSpace<Scalar>> halves) : dim_(dim), halves_(std::move(halves)) {
    if (dim != 2 && dim != 3)
      throw DomainError("domain dimension must be 2 or 3");
    for (auto &h : halves_) {
      if (h.normal.size() != dim)
        throw DomainError("half-space normal has wrong dimension");
      const Scalar len = h.normal.norm();
      if (!(len > Scalar(0)))
        throw DomainError("half-space normal must be nonzero");
      h.normal /= len;
      h.offset /= len;
    }
  }

  static ConvexDomain whole_space(int dim) { return ConvexDomain(dim, {}); }

  /// {x : direction . x > 0}.
  static ConvexDomain half_space(const PointType &direction) {
    return ConvexDomain(static_cast<int>(direction.size()), {{-direction, Scalar(0)}});
  }

  static ConvexDomain upper_half_plane() {
    return half_space(PointType(make_point({0.0, 1.0}).template cast<Scalar>()));
  }

  /// Planar wedge {theta in (0, alpha)} with vertex at the origin, alpha in (0, pi].
  static ConvexDomain wedge(Scalar alpha) {
    if (!(alpha > Scalar(0) && alpha <= Scalar(pi) + Scalar(1e-15)))
      throw DomainError("wedge opening must lie in (0, pi]");
    PointType lower(2), upper(2);
    lower << Scalar(0), Scalar(-1);
    upper << -std::sin(alpha), std::cos(alpha);
    return ConvexDomain(2, {{lower, Scalar(0)}, {upper, Scalar(0)}});
  }

  /// Axis-aligned open box.
  static ConvexDomain box(const PointType &lo, const PointType &hi) {
    const int d = static_cast<int>(lo.size());
    std::vector<HalfSpace<Scalar>> halves;
    for (int i = 0; i < d; ++i) {
      PointType e = PointType::Zero(d);
      e[i] = Scalar(1);
      halves.push_back({e, hi[i]});
      halves.push_back({-e, -lo[i]});
    }
    return ConvexDomain(d, std::move(halves));
  }

  int dim() const { return dim_; }
  const std::vector<HalfSpace<Scalar>> &halves() const { return halves_; }

  /// Halves with duplicates removed (a wedge of opening pi repeats its face).
  std::vector<HalfSpace<Scalar>> faces() const {
    std::vector<HalfSpace<Scalar>> out;
    for (const auto &h : halves_) {
      bool dup = false;
      for (const auto &f : out)
        dup = dup || f.same_face(h);
      if (!dup)
        out.push_back(h);
    }
    return out;
  }

private:
  int dim_ = 2;
  std::vector<HalfSpace<Scalar>> halves_;
};

using HalfSpaced = HalfSpace<double>;
using Balld = Ball<double>;
using Domain = ConvexDomain<double>;

template <typename Scalar>
Membership contains(const ConvexDomain<Scalar> &domain, const PointT<Scalar> &x, Scalar tol = Scalar(boundary_tol)) {
  bool on_face = false;
  for (const auto &h : domain.halves()) {
    const Scalar s = h.signed_distance(x);
    if (s > tol)
      return Membership::exterior;
    if (s >= -tol)
      on_face = true;
  }
  return on_face ? Membership::boundary : Membership::interior;
}

template <typename Scalar>
bool in_closure(const ConvexDomain<Scalar> &domain, const PointT<Scalar> &x) {
  return contains(domain, x) != Membership::exterior;
}

/// T_{p,r} applied to the domain: the returned set is (domain - p) / r.
template <typename Scalar>
ConvexDomain<Scalar> rescale_domain(const ConvexDomain<Scalar> &domain, const PointT<Scalar> &p, Scalar r) {
  if (!(r > Scalar(0)))
    throw InvalidScale("rescale_domain: scale must be positive");
  std::vector<HalfSpace<Scalar>> halves;
  halves.reserve(domain.halves().size());
  for (const auto &h : domain.halves())
    halves.push_back({h.normal, (h.offset - h.normal.dot(p)) / r});
  return ConvexDomain<Scalar>(domain.dim(), std::move(halves));
}

/// Faces whose hyperplane passes within tol of x, deduplicated.
template <typename Scalar>
std::vector<HalfSpace<Scalar>> active_faces(const ConvexDomain<Scalar> &domain, const PointT<Scalar> &x,
                                            Scalar tol = Scalar(boundary_tol)) {
  std::vector<HalfSpace<Scalar>> out;
  for (const auto &h : domain.faces())
    if (std::abs(h.signed_distance(x)) <= tol)
      out.push_back(h);
  return out;
}

/// A boundary point is flat when exactly one distinct face is active there.
template <typename Scalar>
bool is_flat_boundary_point(const ConvexDomain<Scalar> &domain, const PointT<Scalar> &x) {
  return contains(domain, x) == Membership::boundary && active_faces(domain, x).size() == 1;
}

/// Unit normal pointing into the domain at a flat boundary point.
template <typename Scalar>
std::optional<PointT<Scalar>> inward_normal(const ConvexDomain<Scalar> &domain, const PointT<Scalar> &x) {
  auto faces = active_faces(domain, x);
  if (faces.size() != 1 || contains(domain, x) != Membership::boundary)
    return std::nullopt;
  return PointT<Scalar>(-faces.front().normal);
}

namespace detail {

template <typename Scalar>
void push_unique(std::vector<PointT<Scalar>> &out, const PointT<Scalar> &x, Scalar tol) {
  for (const auto &y : out)
    if ((x - y).norm() <= tol)
      return;
  out.push_back(x);
}

} // namespace detail

/// Non-flat boundary points inside the region. In 2D these are the vertices;
/// in 3D, vertices plus points sampled along edges.
template <typename Scalar>
std::vector<PointT<Scalar>> singular_points(const ConvexDomain<Scalar> &domain, const Ball<Scalar> &region,
                                            int edge_samples = 32) {
  using P = PointT<Scalar>;
  std::vector<P> out;
  const auto faces = domain.faces();
  const Scalar merge_tol = Scalar(1e-9);
  auto accept = [&](const P &x) {
    return region.contains(x) && contains(domain, x) == Membership::boundary && active_faces(domain, x).size() >= 2;
  };
  if (domain.dim() == 2) {
    for (std::size_t i = 0; i < faces.size(); ++i)
      for (std::size_t j = i + 1; j < faces.size(); ++j) {
        Eigen::Matrix<Scalar, 2, 2> A;
        A << faces[i].normal[0], faces[i].normal[1], faces[j].normal[0], faces[j].normal[1];
        if (std::abs(A.determinant()) < Scalar(1e-12))
          continue;
        Eigen::Matrix<Scalar, 2, 1> b(faces[i].offset, faces[j].offset);
        P x = P(A.partialPivLu().solve(b));
        if (accept(x))
          detail::push_unique(out, x, merge_tol);
      }
    return out;
  }
  // 3D: vertices from triples, then edge samples from pairs.
  for (std::size_t i = 0; i < faces.size(); ++i)
    for (std::size_t j = i + 1; j < faces.size(); ++j)
      for (std::size_t k = j + 1; k < faces.size(); ++k) {
        Eigen::Matrix<Scalar, 3, 3> A;
        A.row(0) = faces[i].normal.transpose();
        A.row(1) = faces[j].normal.transpose();
        A.row(2) = faces[k].normal.transpose();
        if (std::abs(A.determinant()) < Scalar(1e-12))
          continue;
        Eigen::Matrix<Scalar, 3, 1> b(faces[i].offset, faces[j].offset, faces[k].offset);
        P x = P(A.fullPivLu().solve(b));
        if (accept(x))
          detail::push_unique(out, x, merge_tol);
      }
  for (std::size_t i = 0; i < faces.size(); ++i)
    for (std::size_t j = i + 1; j < faces.size(); ++j) {
      Eigen::Matrix<Scalar, 3, 1> n1 = faces[i].normal, n2 = faces[j].normal;
      Eigen::Matrix<Scalar, 3, 1> dir = n1.cross(n2);
      if (dir.norm() < Scalar(1e-12))
        continue;
      dir.normalize();
      // Point on both planes closest to the region center.
      Eigen::Matrix<Scalar, 3, 3> A;
      A.row(0) = n1.transpose();
      A.row(1) = n2.transpose();
      A.row(2) = dir.transpose();
      Eigen::Matrix<Scalar, 3, 1> b(faces[i].offset, faces[j].offset, dir.dot(Eigen::Matrix<Scalar, 3, 1>(region.center)));
      Eigen::Matrix<Scalar, 3, 1> base = A.fullPivLu().solve(b);
      for (int s = -edge_samples; s <= edge_samples; ++s) {
        P x = P(base + dir * (region.radius * Scalar(s) / Scalar(edge_samples)));
        if (accept(x))
          detail::push_unique(out, x, merge_tol);
      }
    }
  return out;
}

template <typename Scalar>
struct SphereNode {
  PointT<Scalar> point;
  Scalar weight;
};

/// Quadrature nodes on the sphere bounding `ball`, weights summing to its
/// surface measure: uniform angles in 2D, a Fibonacci lattice in 3D.
template <typename Scalar>
std::vector<SphereNode<Scalar>> sphere_samples(const Ball<Scalar> &ball, int count) {
  const int dim = static_cast<int>(ball.center.size());
  std::vector<SphereNode<Scalar>> nodes;
  nodes.reserve(count);
  const Scalar r = ball.radius;
  if (dim == 2) {
    const Scalar w = Scalar(2 * pi) * r / Scalar(count);
    for (int i = 0; i < count; ++i) {
      const Scalar t = Scalar(2 * pi) * (Scalar(i) + Scalar(0.5)) / Scalar(count);
      PointT<Scalar> x = ball.center;
      x[0] += r * std::cos(t);
      x[1] += r * std::sin(t);
      nodes.push_back({x, w});
    }
    return nodes;
  }
  const Scalar w = Scalar(4 * pi) * r * r / Scalar(count);
  const Scalar golden = Scalar(pi) * (Scalar(3) - std::sqrt(Scalar(5)));
  for (int i = 0; i < count; ++i) {
    const Scalar z = Scalar(1) - (Scalar(2) * Scalar(i) + Scalar(1)) / Scalar(count);
    const Scalar rho = std::sqrt(std::max(Scalar(0), Scalar(1) - z * z));
    const Scalar t = golden * Scalar(i);
    PointT<Scalar> x = ball.center;
    x[0] += r * rho * std::cos(t);
    x[1] += r * rho * std::sin(t);
    x[2] += r * z;
    nodes.push_back({x, w});
  }
  return nodes;
}

/// Closed angular intervals [a, b] with 0 <= a < b <= 2 pi.
template <typename Scalar>
using ArcSet = std::vector<std::pair<Scalar, Scalar>>;

namespace detail {

template <typename Scalar>
ArcSet<Scalar> intersect_arcs(const ArcSet<Scalar> &a, const ArcSet<Scalar> &b) {
  ArcSet<Scalar> out;
  for (const auto &x : a)
    for (const auto &y : b) {
      const Scalar lo = std::max(x.first, y.first);
      const Scalar hi = std::min(x.second, y.second);
      if (hi > lo)
        out.emplace_back(lo, hi);
    }
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace detail

/// Angles t for which center + radius (cos t, sin t) lies in the closure of a
/// planar domain.
template <typename Scalar>
ArcSet<Scalar> arcs_inside(const ConvexDomain<Scalar> &domain, const PointT<Scalar> &center, Scalar radius) {
  const Scalar two_pi = Scalar(2 * pi);
  ArcSet<Scalar> arcs{{Scalar(0), two_pi}};
  for (const auto &h : domain.faces()) {
    // cos(t - phi) <= kappa
    const Scalar kappa = (h.offset - h.normal.dot(center)) / radius;
    if (kappa >= Scalar(1))
      continue;
    if (kappa < Scalar(-1))
      return {};
    const Scalar phi = std::atan2(h.normal[1], h.normal[0]);
    const Scalar half = std::acos(kappa);
    Scalar lo = std::fmod(phi + half, two_pi);
    if (lo < Scalar(0))
      lo += two_pi;
    const Scalar len = two_pi - Scalar(2) * half;
    ArcSet<Scalar> allowed;
    if (lo + len <= two_pi) {
      allowed.emplace_back(lo, lo + len);
    } else {
      allowed.emplace_back(lo, two_pi);
      allowed.emplace_back(Scalar(0), lo + len - two_pi);
    }
    arcs = detail::intersect_arcs(arcs, allowed);
    if (arcs.empty())
      return arcs;
  }
  return arcs;
}

/// Largest t in [0, max_t] such that from + s dir stays in the closure of
/// the domain intersected with the ball, for all s in [0, t]. `from` must
/// lie in that closed set. Returns the hit face (-1 for the sphere, -2 if no
/// constraint was hit before max_t).
template <typename Scalar>
std::pair<Scalar, int> exit_distance(const ConvexDomain<Scalar> &domain, const std::optional<Ball<Scalar>> &ball,
                                     const PointT<Scalar> &from, const PointT<Scalar> &dir, Scalar max_t) {
  Scalar best = max_t;
  int hit = -2;
  const auto &halves = domain.halves();
  for (std::size_t i = 0; i < halves.size(); ++i) {
    const Scalar rate = halves[i].normal.dot(dir);
    if (rate <= Scalar(0))
      continue;
    const Scalar t = std::max(Scalar(0), -halves[i].signed_distance(from)) / rate;
    if (t < best) {
      best = t;
      hit = static_cast<int>(i);
    }
  }
  if (ball) {
    const PointT<Scalar> d = from - ball->center;
    const Scalar a = dir.squaredNorm();
    const Scalar b = Scalar(2) * d.dot(dir);
    const Scalar c = d.squaredNorm() - ball->radius * ball->radius;
    const Scalar disc = b * b - Scalar(4) * a * c;
    if (disc >= Scalar(0)) {
      const Scalar t = std::max(Scalar(0), (-b + std::sqrt(disc)) / (Scalar(2) * a));
      if (t < best) {
        best = t;
        hit = -1;
      }
    }
  }
  return {best, hit};
}

} // namespace almgren

#endif
