#ifndef ALMGREN_CRITICAL_HPP
#define ALMGREN_CRITICAL_HPP

#include "almgren/frequency.hpp"
#include "almgren/symmetry.hpp"

#include <iosfwd>
#include <limits>
#include <vector>

namespace almgren {

enum class CriticalKind { interior, boundary_flat, boundary_singular };

const char *kind_name(CriticalKind kind);

struct CriticalPoint {
  Point location;
  CriticalKind kind = CriticalKind::interior;
  double gradient_norm = 0.0;     // |grad u| for interior points
  double normal_derivative = 0.0; // boundary_flat only
  double N0 = std::numeric_limits<double>::quiet_NaN();
};

struct CriticalOptions {
  int newton_iterations = 60;
  bool estimate_N0 = false;
  double blowup_ratio = 0.5;
  int blowup_depth = 10;
};

/// Interior zeros of grad u, flat boundary points where the normal derivative
/// vanishes, and every singular boundary point, all inside `region`.
std::vector<CriticalPoint> critical_points(const Field &field, const Domain &domain, const Balld &region, double step,
                                           double tol, const CriticalOptions &options = {});

/// (u(Q + h eta) - u(Q)) / h, Richardson-extrapolated over a halving h ladder.
double normal_derivative(const Field &field, const Domain &domain, const Point &Q, double h0 = 1e-2, int levels = 6);

struct BlowupScale {
  double r;
  double H;
  double D;
  double N;
};

struct BlowupTrace {
  Point Q;
  std::vector<BlowupScale> scales; // r_j = ratio^j, truncated at the first degenerate window
  double N0 = 0.0;
  double exponent = 0.0;
  double exponent_gap = 0.0; // |exponent - N0|
  bool monotone = true;
  double monotonicity_violation = 0.0;
};

/// N(Q, ratio^j) for j < depth, an extrapolated limit N0 and the growth
/// exponent of H^{1/2} r^{-(n-1)/2} over the tail.
BlowupTrace blowup_trace(const Field &field, const Domain &domain, const Point &Q, double ratio = 0.5, int depth = 10,
                         const Quadrature &quad = {}, double monotone_tol = 1e-3);

struct RegularityReport {
  Point Q;
  double N0 = 0.0;
  double normal_derivative = 0.0;
  bool member = false;
  double margin = 0.0;
  bool passed = false;
};

/// N0 and membership of Q in S^{n-2}_{epsilon, r} with r the smallest blow-up
/// scale. Requires only that Q be a flat boundary point.
RegularityReport epsilon_regularity_report(const Field &field, const Domain &domain, const Point &Q,
                                           double epsilon = 0.01, double ratio = 0.5, int depth = 10);

/// Throws ValidationError unless Q is a flat boundary point with vanishing
/// normal derivative (within tol).
bool epsilon_regularity_check(const Field &field, const Domain &domain, const Point &Q, double epsilon = 0.01,
                              double tol = 1e-8);

struct MinkowskiRow {
  double r;
  double volume;
  double content;
};

/// Lattice-counted Vol(B_r(A)) / (2r)^{n-s}; lattice spacing r * resolution.
std::vector<MinkowskiRow> minkowski_content(const std::vector<Point> &points, double s,
                                            const std::vector<double> &radii, double resolution = 1.0 / 32.0);

/// Columns x,y[,z],kind,gradient_norm,normal_derivative,N0.
void write_critical_csv(std::ostream &os, const std::vector<CriticalPoint> &points);
/// Columns r,H,D,N.
void write_trace_csv(std::ostream &os, const BlowupTrace &trace);

} // namespace almgren

#endif
