#ifndef ALMGREN_QUADRATURE_HPP
#define ALMGREN_QUADRATURE_HPP

#include "almgren/geometry.hpp"

#include <vector>

namespace almgren {

struct ShellNode {
  Point x;
  Vector dir; // unit vector from the center
  double weight;
};

/// Quadrature on the part of the sphere dB_r(p) lying in the closure of the
/// domain. In 2D the clipped arcs are integrated exactly by composite
/// Gauss-Legendre with about `count` nodes per full circle; in 3D the
/// Fibonacci lattice of `count` nodes is filtered by membership.
std::vector<ShellNode> shell_nodes(const Domain &domain, const Point &p, double r, int count);

struct RadialNode {
  double rho;
  double weight;
};

/// Gauss-Legendre nodes on [a, b] under the smoothstep substitution, which
/// absorbs square-root behaviour at both ends.
std::vector<RadialNode> radial_nodes(double a, double b, int panels, int order = 8);

/// Radii in (0, r_max) at which the shell dB_rho(p) changes topology
/// relative to the domain: distances to faces and to singular points.
std::vector<double> radial_breaks(const Domain &domain, const Point &p, double r_max);

/// Default node count per full sphere: 720 in 2D, 4096 in 3D.
int default_sphere_nodes(int dim);

} // namespace almgren

#endif
