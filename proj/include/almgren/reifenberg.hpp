#ifndef ALMGREN_REIFENBERG_HPP
#define ALMGREN_REIFENBERG_HPP

#include "almgren/beta.hpp"

#include <optional>
#include <vector>

namespace almgren {

/// Disjoint balls B_{tau_i}(x_i) inducing mu = sum_i tau_i^k delta_{x_i}.
struct BallFamily {
  int k = 1;
  int dim = 2;
  std::vector<Balld> balls;

  DiscreteMeasure measure() const;
  /// Throws ValidationError naming the first overlapping pair. Touching balls are allowed.
  void validate() const;
};

struct ReifWitness {
  Point x;
  int level = 0;
  double radius = 1.0;
  double mass = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct ReifVerdict {
  bool satisfied = true;
  std::optional<ReifWitness> worst;
  /// Worst witness at each level l = 0..max_depth (empty when the level had no triggers).
  std::vector<std::optional<ReifWitness>> per_level;
  double packing = 0.0;
  std::size_t triggers = 0;
  /// max over sample points x and dyadic r with B_r(x) in B_1 of mu(B_r(x)) / (omega_k r^k).
  double ahlfors_ratio = 0.0;
  double weight = 0.0;
};

/// Volume of the unit k-ball.
double unit_ball_volume(int k);

ReifVerdict discrete_reifenberg_check(const BallFamily &family, double delta, double eps_k, int max_depth);

/// The sample is reweighted to spacing^k, spacing = median nearest-neighbour distance.
ReifVerdict rectifiable_check(const DiscreteMeasure &sample, int k, double delta, int max_depth);

/// Shared dyadic sweep. eps_k <= 0 disables the mass trigger.
ReifVerdict reifenberg_sweep(const DiscreteMeasure &mu, int k, double delta, double eps_k, int max_depth);

double median_spacing(const std::vector<Point> &points);

/// 2^m touching balls of radius 2^-m along the diameter of B_1 in direction dir.
BallFamily collinear_family(int m, const Point &dir);
/// Touching balls of radius tau filling the square [-half, half]^2.
BallFamily square_grid_family(double tau, double half);

} // namespace almgren

#endif
