#ifndef ALMGREN_COVERING_HPP
#define ALMGREN_COVERING_HPP

#include "almgren/beta.hpp"
#include "almgren/frequency.hpp"
#include "almgren/symmetry.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace almgren {

struct CoverParams {
  double rho = 0.1;
  double eta = 0.01;
  double eta_prime = 0.02;
  double gamma = 0.1;
  double epsilon = 0.01;
  double R = 1.0 / 16;
  int k = 0;
  /// Frequency ceiling; <= 0 means measure it over the region.
  double E = 0.0;
  /// Strata lattice spacing; <= 0 means region radius / 16.
  double lattice_step = 0.0;
  /// Smallest symmetry scale is max(eta R, resolution_factor * grid spacing).
  double resolution_factor = 1.0;

  void validate() const;
};

enum class BallTag { good, bad, stop };

const char *tag_name(BallTag tag);

struct BallNode {
  int id = -1;
  int parent = -1;
  int tree = -1;
  Point center;
  double radius = 0.0;
  BallTag tag = BallTag::good;
  /// Classification witness: minimum of N(q, gamma rho r) over strata points q.
  std::optional<double> witness_value;
  std::optional<Point> witness;
  /// (k-1)-plane of a bad ball; absent when k = 0 or the small-drop set is empty.
  std::optional<AffinePlane<double>> plane;
  /// Bad-tree stops: measured sup N(p, 2 r_s) near the center.
  std::optional<double> drop_sup;
};

struct TreeReport {
  int root = -1;
  bool good = true;
  std::vector<int> leaves;
  std::vector<int> stops;
  double leaf_packing = 0.0; // sum r^k over leaves
  double stop_packing = 0.0; // sum r^k over stops
  bool size_control = true;  // (D)
  bool covering_control = true; // (C)
};

struct CoverBall {
  Point center;
  double radius;      // max(R, r_s)
  double stop_radius; // r_s
  int node = -1;
};

struct CoverResult {
  CoverParams params;
  double E = 0.0;
  double eta_R = 0.0;
  double finest_scale = 0.0;
  std::vector<BallNode> nodes;
  std::vector<TreeReport> trees;
  std::vector<CoverBall> cover;
  /// Leaf counts keyed by refinement level j (radius = root radius rho^j).
  std::map<int, int> leaves_per_level;
  std::vector<Point> strata;
  double packing = 0.0;        // sum over cover of r_x^k
  double count_R_k = 0.0;      // |cover| R^k
  double stop_packing = 0.0;   // sum over stops of r_s^k
  int alternations = 0;
  bool covered = true;         // every strata lattice point lies in the cover
  bool radius_laws = true;     // (D) for every tree
  std::size_t uncovered = 0;
};

/// Shared state for one cover construction: the strata lattice and a cache of
/// frequency evaluations.
class CoverContext {
public:
  CoverContext(const Field &field, const Domain &domain, const Balld &region, const CoverParams &params,
               const Quadrature &quad = {});

  const Field &field() const { return field_; }
  const Domain &domain() const { return domain_; }
  const Balld &region() const { return region_; }
  const CoverParams &params() const { return params_; }
  double E() const { return E_; }
  /// Smallest scale used for strata membership.
  double finest_scale() const { return finest_; }
  double step() const { return step_; }

  const std::vector<Point> &strata() const { return strata_; }
  /// Indices into strata() of points inside the closed ball.
  std::vector<std::size_t> strata_in(const Point &c, double r) const;

  /// N(strata[i], s), cached; degenerate heights count as 0.
  double N(std::size_t i, double s);
  /// Batch form, evaluated in parallel for missing entries.
  std::vector<double> N(const std::vector<std::size_t> &idx, double s);
  double N_at(const Point &x, double s) const;

private:
  const Field &field_;
  Domain domain_;
  Balld region_;
  CoverParams params_;
  Quadrature quad_;
  double E_ = 0.0;
  double step_ = 0.0;
  double finest_ = 0.0;
  std::vector<Point> strata_;
  std::map<std::pair<std::size_t, double>, double> cache_;
  std::mutex mutex_;
};

struct Classification {
  BallTag tag = BallTag::good;
  std::optional<double> witness_value;
  std::optional<Point> witness;
  std::optional<AffinePlane<double>> plane;
  /// Strata points whose N(., 2 eta r) >= E - eta.
  std::size_t small_drop = 0;
};

Classification classify_ball(CoverContext &ctx, const Balld &ball);

/// Builds the tree rooted at nodes[root] and appends its nodes. The root must
/// already be classified.
TreeReport good_tree(CoverContext &ctx, std::vector<BallNode> &nodes, int root);
TreeReport bad_tree(CoverContext &ctx, std::vector<BallNode> &nodes, int root);

CoverResult build_cover(const Field &field, const Domain &domain, const Balld &region, const CoverParams &params,
                        const Quadrature &quad = {});

/// Frequency ceiling: max of max_frequency(q, 2 radius, 4) over every
/// `stride`-th lattice point of spacing `step` and the extra points.
double measure_E(const Field &field, const Domain &domain, const Balld &region, double step, int stride,
                 const std::vector<Point> &extra, const Quadrature &quad = {});

/// Volume of the union of closed r-balls about the points, by counting the
/// lattice of spacing h.
double tubular_volume(const std::vector<Point> &points, double r, double h);

struct VolumeRow {
  double r = 0.0;
  std::size_t members = 0;
  double volume = 0.0;
  double ratio = 0.0;     // volume / r^{n-k}
  double minkowski = 0.0; // volume / (2r)^{n-k}
};

/// For each r: strata scan of spacing r and smallest scale max(r, h) for
/// grid spacing h, then the tubular volume at resolution r/8.
std::vector<VolumeRow> volume_estimate(const Field &field, const Domain &domain, const Balld &region, int k,
                                       double epsilon, const std::vector<double> &radii);

} // namespace almgren

#endif
