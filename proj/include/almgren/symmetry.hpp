#ifndef ALMGREN_SYMMETRY_HPP
#define ALMGREN_SYMMETRY_HPP

#include "almgren/frequency.hpp"

#include <iosfwd>
#include <vector>

namespace almgren {

/// T_{p,r}u(y) = (u(p + r y) - u(p)) / normalization on T_{p,r}Omega, with
/// unit L2 norm on the unit sphere.
struct RescaledWindow {
  Field window;
  Point p;
  double r;
  double normalization;
};

/// Throws DegenerateError when the normalization vanishes.
RescaledWindow rescale(const Field &field, const Domain &domain, const Point &p, double r,
                       const Quadrature &quad = {});

struct WindowQuadrature {
  int directions = 0; // 0: 128 in 2D, 512 in 3D
  int radial_panels = 2;
};

struct SymmetryReport {
  /// defects[k] for k = 0..n; defects[n] >= 1 since no normalized window is constant.
  std::vector<double> defects;
  double homogeneous_part = 0.0; // int |T u - P / c|^2 over B_1
  double exponent = 0.0;         // lambda used for P
  Vector covariance_eigenvalues; // ascending, divided by the trace
  Matrix covariance_directions;  // matching eigenvectors as columns
};

SymmetryReport symmetry_report(const RescaledWindow &window, const WindowQuadrature &quad = {});

/// defect_0 + (sum of the k smallest normalized covariance eigenvalues).
double symmetry_defect(const RescaledWindow &window, int k, const WindowQuadrature &quad = {});

struct SymmetryCheck {
  bool symmetric;
  bool degenerate;
  double defect; // 0 when degenerate
};

SymmetryCheck check_quant_symmetry(const Field &field, const Domain &domain, const Point &p, double r, int k,
                                   double epsilon, const WindowQuadrature &quad = {});

/// Degenerate windows count as symmetric.
bool is_quant_symmetric(const Field &field, const Domain &domain, const Point &p, double r, int k, double epsilon,
                        const WindowQuadrature &quad = {});

/// Scales max_scale 2^-j down to r, at most 12 of them.
std::vector<double> scale_ladder(double r, double max_scale);

/// Smallest (k+1)-defect over the scale ladder; +inf-free: degenerate scales
/// report 0. A point is in the stratum iff this is >= epsilon.
double strata_margin(const Field &field, const Domain &domain, const Point &p, int k, double r, double max_scale,
                     const WindowQuadrature &quad = {});

bool strata_membership(const Field &field, const Domain &domain, const Point &p, int k, double epsilon, double r,
                       double max_scale, const WindowQuadrature &quad = {});

struct StrataPoint {
  Point x;
  double margin;
};

struct StrataScan {
  std::vector<StrataPoint> lattice; // every scanned point with its margin
  std::vector<Point> members;
};

/// Lattice points of spacing `step` about the region center, inside region
/// and the domain closure. max_scale = 0 uses the region radius.
StrataScan strata_scan(const Field &field, const Domain &domain, const Balld &region, double step, int k,
                       double epsilon, double r, double max_scale = 0.0, const WindowQuadrature &quad = {});

std::vector<Point> lattice_points(const Domain &domain, const Balld &region, double step);

/// Columns x,y[,z],margin,member.
void write_scan_csv(std::ostream &os, const StrataScan &scan, double epsilon);

} // namespace almgren

#endif
